#include <doctest.h>

#include <cmath>

#include "blowup/analysis.hpp"
#include "blowup/error.hpp"

using namespace blowup;

TEST_SUITE("analysis") {
  TEST_CASE("mode and fit selection") {
    CHECK(genericMode({7, 1, {}}) == 1);
    CHECK(genericMode({12, 2, {}}) == 2);
    CHECK((expectedFitKind({7, 1, {}}) == FitKind::LogFit));
    CHECK((expectedFitKind({8, 1, {}}) == FitKind::PowerFit));
  }

  TEST_CASE("fitting an unfinished run fails cleanly") {
    RunTrace tr;
    tr.t = {0, 1};
    tr.drU0 = {1, 1};
    tr.status = "NoBlowup";
    try {
      fitTrace(tr, {8, 1, {}});
      FAIL("expected NoBlowup");
    } catch (const Error& e) {
      CHECK((e.kind() == ErrorKind::NoBlowup));
    }
  }

  TEST_CASE("log plot rows") {
    RunTrace tr;
    tr.t = {0.0L, 0.5L};
    tr.drU0 = {1, 4};
    const auto rows = logPlot(tr, 0.75L);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].x == doctest::Approx(std::log(4.0)));
    CHECK(rows[1].y == doctest::Approx(2.0));
  }

  TEST_CASE("compare on a short d=8 run") {
    SimConfig c;
    c.d = 8;
    c.M = 201;
    c.maxGradient = 1e6;
    const auto tr = run(c);
    const auto rep = compareRun(tr, {8, 1, {}});
    REQUIRE(rep.fit);
    CHECK(rep.status == "Blowup");
    CHECK(rep.error.empty());
    CHECK(rep.predictedValue == doctest::Approx(0.1306019).epsilon(1e-6));
    CHECK(std::abs(rep.relativeError) < 0.05);
    CHECK(rep.overlays.size() >= 3);
    for (const auto& o : rep.overlays) {
      CHECK(o.eps <= 0.1);
      CHECK(o.supDistance >= 0);
      CHECK(o.y.front() == doctest::Approx(2 * o.eps));
    }
    const auto js = compareJson({rep}, {"d8"});
    CHECK(js.find("\"d8\"") != std::string::npos);
  }
}
