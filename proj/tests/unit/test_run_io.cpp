#include <doctest.h>

#include <filesystem>
#include <random>

#include "blowup/error.hpp"
#include "blowup/run_io.hpp"

using namespace blowup;
namespace fs = std::filesystem;

namespace {
fs::path scratchDir(const std::string& tag) {
  std::random_device rd;
  auto p = fs::temp_directory_path() / ("blowup-" + tag + "-" + std::to_string(rd()));
  fs::create_directories(p);
  return p;
}

ErrorKind kindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}
}  // namespace

TEST_SUITE("run_io") {
  TEST_CASE("config round trip and hash") {
    SimConfig c;
    c.d = 9;
    c.M = 301;
    c.initial.name = "r+sin(r)";
    const auto back = configFromJson(configToJson(c));
    CHECK(back.d == 9);
    CHECK(back.M == 301);
    CHECK(back.initial.name == "r+sin(r)");
    CHECK(configHash(back) == configHash(c));
    c.M = 302;
    CHECK(configHash(back) != configHash(c));
    CHECK(hexHash(0xabcULL).size() == 16);
    // defaults fill missing keys
    const std::string onlyD = R"({"d": 7})";
    CHECK(configFromJson(onlyD).M == SimConfig{}.M);
    const auto tab = configFromJson(R"({"L": 1, "initial": {"name": "tabulated", "r": [0, 1], "u": [0, 0.5]}})");
    CHECK(tab.initial(0.5) == doctest::Approx(0.25));
  }

  TEST_CASE("bad configs") {
    const std::vector<std::string> texts{R"({"dee": 7})", R"({"d": "seven"})", "{", R"({"d": 5})",
                                         R"j({"initial": "exp(r)"})j"};
    for (const auto& t : texts) CHECK((kindOf([&] { configFromJson(t); }) == ErrorKind::BadConfig));
  }

  TEST_CASE("run directory round trip") {
    const auto dir = scratchDir("run");
    SimConfig c;
    c.d = 8;
    c.M = 101;
    c.maxGradient = 1e6;
    const auto tr = run(c);
    RunManifest m;
    m.command = "test";
    m.configHash = hexHash(configHash(c));
    writeRunDirectory(dir, c, tr, m);
    for (auto f : {"config.json", "trace.csv", "manifest.json"}) CHECK(fs::exists(dir / f));
    const auto back = readRunDirectory(dir);
    REQUIRE(back.trace.size() == tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
      CHECK(back.trace.t[i] == tr.t[i]);
      CHECK(back.trace.drU0[i] == tr.drU0[i]);
    }
    CHECK(back.trace.status == tr.status);
    CHECK(back.trace.reachedStop == tr.reachedStop);
    REQUIRE(back.trace.snapshots.size() == tr.snapshots.size());
    for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
      CHECK(back.trace.snapshots[i].t == tr.snapshots[i].t);
      CHECK(back.trace.snapshots[i].u == tr.snapshots[i].u);
      CHECK(back.trace.snapshots[i].reason == tr.snapshots[i].reason);
    }
    CHECK(back.manifest.configHash == m.configHash);
    CHECK(back.manifest.steps == tr.steps);
    CHECK(back.config.M == 101);
    fs::remove_all(dir);
  }

  TEST_CASE("fit json keeps long double T") {
    FitResult f;
    f.kind = FitKind::LogFit;
    f.T = 0.2291254455555555555L;
    f.C = 0.2233;
    const auto back = fitFromJson(fitToJson(f));
    CHECK(back.T == f.T);
    CHECK(back.C == f.C);
    CHECK((back.kind == FitKind::LogFit));
  }

  TEST_CASE("missing files") {
    CHECK_THROWS_AS(readText("/nonexistent/blowup/x.json"), Error);
    CHECK_THROWS_AS(readRunDirectory("/nonexistent/blowup"), Error);
  }
}
