#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "blowup/error.hpp"
#include "blowup/profile.hpp"
#include "oracles.hpp"

using namespace blowup;
using std::numbers::pi;

namespace {
const ProfileSolution& d7() {
  static const auto s = solveProfile({7, 1, {}});
  return s;
}
const ProfileSolution& d8() {
  static const auto s = solveProfile({8, 1, {}});
  return s;
}
}  // namespace

TEST_SUITE("profile") {
  TEST_CASE("orbit starts on the origin series") {
    const auto& s = d7();
    CHECK(s.xMin == doctest::Approx(-12.0));
    CHECK(std::abs((s.v.front() + pi) / (2 * std::exp(s.xMin)) - 1) < 1e-10);
  }

  TEST_CASE("orbit stays in the strip and increases") {
    for (const auto* s : {&d7(), &d8()})
      for (std::size_t i = 0; i < s->v.size(); ++i) {
        CHECK(s->v[i] > -pi);
        CHECK(s->v[i] < 0.0);
        CHECK(s->vPrime[i] > 0.0);
      }
  }

  TEST_CASE("d=8 orbit inside the trapping region") {
    const auto& s = d8();
    const double g = 3 - std::sqrt(2.0);
    CHECK(s.dc.gamma == doctest::Approx(g).epsilon(1e-14));
    double worst = 0.0;
    for (std::size_t i = 0; i < s.v.size(); ++i) {
      worst = std::max(worst, -std::sin(s.v[i]) - s.vPrime[i]);
      worst = std::max(worst, s.vPrime[i] + g * std::sin(s.v[i]));
    }
    CHECK(worst < 1e-11);
    const auto rep = checkTrapping(s);
    CHECK(rep.maxLowerViolation < 1e-11);
    CHECK(rep.maxUpperViolation < 1e-11);
    CHECK(rep.minBoundaryFlux > 0.0);
  }

  TEST_CASE("U* increases towards pi/2 and never exceeds it") {
    const auto& s = d7();
    double prev = 0.0;
    for (double x = -14; x < 12; x += 0.05) {
      const double u = evalU(s, std::exp(x));
      CHECK(u > prev);
      CHECK(u < pi / 2);
      prev = u;
    }
  }

  TEST_CASE("h agrees with a three-term refit of an RK4 orbit") {
    const auto c = oracle::constants(7, 1);
    const auto o = oracle::rk4Profile(7, 1, 1e-3, -12, 24);
    const double h = oracle::tailAmplitude(o, c, 14, 24);
    CHECK(d7().h == doctest::Approx(h).epsilon(1e-6));
    CHECK(d7().h == doctest::Approx(2.693081745610).epsilon(1e-10));
    CHECK(d7().h > 0);
  }

  TEST_CASE("h does not depend on the integration range") {
    ProfileOptions o;
    o.xMax = 2 * d8().xMax;
    const auto s = solveProfile({8, 1, {}}, o);
    CHECK(std::abs(s.h / d8().h - 1) < 1e-8);
  }

  TEST_CASE("evalU limits") {
    const auto& s = d7();
    CHECK(evalU(s, 0.0) == 0.0);
    CHECK(evalU(s, 1e-7) / 1e-7 == doctest::Approx(1.0).epsilon(1e-8));
    // pi/2 - U underflows the subtraction out here, read the tail through v instead
    CHECK(-0.5 * std::exp(s.dc.gamma * 30.0) * s.evalV(30.0) == doctest::Approx(s.h).epsilon(1e-10));
    const double xi = std::exp(8.0);
    CHECK(std::pow(xi, s.dc.gamma) * (pi / 2 - evalU(s, xi)) == doctest::Approx(s.h).epsilon(1e-3));
    CHECK(evalDUdxi(s, 1e-6) == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("slope normalisation") {
    // for k = 1 the steepest point is the origin
    CHECK(d7().Cs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d7().Cs <= 1.0 + 1e-14);
    const auto o = oracle::rk4Profile(7, 1, 1e-3, -12, 10);
    CHECK(1.0 / oracle::maxSlope(o) == doctest::Approx(d7().Cs).epsilon(1e-8));
    // k = 2: interior maximiser
    const auto s2 = solveProfile({12, 2, {}});
    CHECK(s2.slopeArgmax > 0.0);
    CHECK(s2.Cs > 0.0);
    const auto o2 = oracle::rk4Profile(12, 2, 5e-4, -6, 6);
    CHECK(1.0 / oracle::maxSlope(o2) == doctest::Approx(s2.Cs).epsilon(1e-6));
    ProfileOptions fine;
    fine.step = 0.002;
    CHECK(std::abs(slopeNormalization(solveProfile({12, 2, {}}, fine)) - s2.Cs) < 1e-8);
  }

  TEST_CASE("boundary fluxes") {
    const auto c = derive({8, 1, {}});
    CHECK(lowerBoundaryFlux(c, -pi / 2) == doctest::Approx(1.0));
    CHECK(upperBoundaryFlux(c, -pi / 2) == doctest::Approx(c.gamma * c.gamma));
    CHECK(std::abs(lowerBoundaryFlux(c, -1e-9)) < 1e-8);
    CHECK(std::abs(upperBoundaryFlux(c, -pi + 1e-9)) < 1e-8);
    for (double v = -3.1; v < 0; v += 0.1) {
      CHECK(lowerBoundaryFlux(c, v) > 0);
      CHECK(upperBoundaryFlux(c, v) > 0);
    }
  }

  TEST_CASE("tighter tolerance shrinks violations") {
    ProfileOptions loose;
    loose.tolerance = 1e-8;
    const auto a = checkTrapping(solveProfile({8, 1, {}}, loose));
    const auto b = checkTrapping(d8());
    CHECK(std::max(b.maxLowerViolation, b.maxUpperViolation) <= std::max(1e-14, std::max(a.maxLowerViolation, a.maxUpperViolation)));
  }

  TEST_CASE("subcritical input") { CHECK_THROWS_AS(solveProfile({6, 1, {}}), Error); }

  TEST_CASE("orbit csv") {
    std::ostringstream os;
    writeOrbitCsv(d7(), os);
    CHECK(os.str().rfind("x,v,vPrime\n", 0) == 0);
  }
}
