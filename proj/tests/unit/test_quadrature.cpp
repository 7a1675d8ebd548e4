#include <doctest.h>

#include <cmath>

#include "blowup/quadrature.hpp"
#include "oracles.hpp"

using namespace blowup;

TEST_SUITE("quadrature") {
  TEST_CASE("recurrence matches the explicit sum") {
    for (double a : {0.0, 0.5, 1.5, 2.0616})
      for (int n = 0; n <= 8; ++n)
        for (double z : {0.0, 0.3, 2.0, 7.5})
          CHECK(laguerre(n, a, z) == doctest::Approx(oracle::laguerre(n, a, z)).epsilon(1e-11));
  }

  TEST_CASE("Gauss rule integrates moments exactly") {
    for (double a : {0.5, 1.0, 2.0616}) {
      const auto rule = gaussLaguerre(200, a);
      for (int m = 0; m <= 6; ++m) {
        const double exact = std::tgamma(m + 1 + a);
        CHECK(rule->integrate([m](double z) { return std::pow(z, m); }) == doctest::Approx(exact).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("rules are cached") { CHECK(gaussLaguerre(200, 0.5).get() == gaussLaguerre(200, 0.5).get()); }
}
