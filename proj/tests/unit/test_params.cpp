#include <doctest.h>

#include <cmath>

#include "blowup/error.hpp"
#include "blowup/params.hpp"
#include "oracles.hpp"

using namespace blowup;

TEST_SUITE("params") {
  TEST_CASE("d=7 k=1 closed forms") {
    const auto c = derive({7, 1, {}});
    CHECK(c.omega == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.gamma == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(c.delta == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.K == 6.0);
    CHECK((c.regime == Regime::InnerDominated));
  }

  TEST_CASE("d=12 k=2 and d=9 k=1") {
    const auto a = derive({12, 2, {}});
    CHECK(a.omega == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(a.gamma == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(a.delta == doctest::Approx(2.0).epsilon(1e-15));
    const auto b = derive({9, 1, {}});
    CHECK(b.omega == doctest::Approx(std::sqrt(17.0)).epsilon(1e-14));
    CHECK(b.gamma == doctest::Approx(1.4384471871911697).epsilon(1e-14));
    CHECK(b.delta == doctest::Approx(2.8768943743823393).epsilon(1e-14));
    CHECK((b.regime == Regime::OuterDominated));
  }

  TEST_CASE("subcritical dimensions are rejected") {
    CHECK(criticalDimension(1) == doctest::Approx(2 + 2 + 2 * std::sqrt(2.0)));
    CHECK_THROWS_AS(derive({6, 1, {}}), Error);
    try {
      derive({6.8, 1, {}});
      FAIL("expected SubcriticalDimension");
    } catch (const Error& e) {
      CHECK((e.kind() == ErrorKind::SubcriticalDimension));
    }
    CHECK_NOTHROW(derive({6.9, 1, {}}));
  }

  TEST_CASE("degenerate regime is flagged") {
    const double d = 2.0 / 3.0 * (7 + 2 * std::sqrt(7.0));
    CHECK((derive({d, 1, {}}).regime == Regime::Degenerate));
  }

  TEST_CASE("eigenvalues") {
    CHECK(eigenvalue(ModelParams{7, 1, {}}, 0).lambda == doctest::Approx(-1.0));
    CHECK(eigenvalue(ModelParams{7, 1, {}}, 1).lambda == doctest::Approx(0.0));
    CHECK(std::abs(eigenvalue(ModelParams{7, 1, {}}, 1).beta) < 1e-15);
    CHECK(eigenvalue(ModelParams{8, 1, {}}, 1).beta == doctest::Approx(-0.5 + 2 / (6 - 2 * std::sqrt(2.0))).epsilon(1e-14));
    CHECK(eigenvalue(ModelParams{8, 1, {}}, 1).beta == doctest::Approx(0.1306019).epsilon(1e-6));
    CHECK(eigenvalue(ModelParams{9, 1, {}}, 1).beta == doctest::Approx(-0.5 + 2 / (7 - std::sqrt(17.0))).epsilon(1e-14));
  }

  TEST_CASE("classification") {
    const auto a = classify(ModelParams{7, 1, {}});
    REQUIRE(a.neutralIndex);
    CHECK(*a.neutralIndex == 1);
    CHECK(a.minAdmissibleN == 1);
    CHECK(a.unstableDirections(1) == 0);
    const auto b = classify(ModelParams{12, 2, {}});
    REQUIRE(b.neutralIndex);
    CHECK(*b.neutralIndex == 2);
    CHECK(b.unstableDirections(2) == 1);
    const auto c = classify(ModelParams{8, 1, {}});
    CHECK(!c.neutralIndex);
    CHECK(c.minAdmissibleN == 1);
  }

  TEST_CASE("grid properties") {
    for (int k = 1; k <= 4; ++k)
      for (int i = 1; i <= 40; ++i) {
        const double d = criticalDimension(k) + 0.05 * i * i;
        const auto c = derive({d, k, {}});
        const auto o = oracle::constants(d, k);
        CHECK(c.omega == doctest::Approx(o.omega).epsilon(1e-13));
        CHECK(std::abs((d - 2 - c.gamma) - (c.gamma + c.omega)) <= 1e-14 * (d - 2 - c.gamma));
        CHECK((d - 2 - c.omega) / 4 > k / 2.0);
        for (int n = 0; n < 4; ++n) {
          const auto e = eigenvalue(c, n);
          CHECK(eigenvalue(c, n + 1).lambda - e.lambda == doctest::Approx(1.0));
          CHECK((e.beta > 0) == (e.lambda > 0));
        }
      }
  }

  TEST_CASE("omega vanishes at the critical dimension and grows like d") {
    CHECK(derive({criticalDimension(1) + 1e-9, 1, {}}).omega < 1e-3);
    CHECK(derive({1e6, 1, {}}).omega / 1e6 == doctest::Approx(1.0).epsilon(1e-5));
  }

  TEST_CASE("geometric dimension") {
    CHECK(isGeometric({7, 1, {}}));
    CHECK(!isGeometric({7.5, 1, {}}));
  }
}
