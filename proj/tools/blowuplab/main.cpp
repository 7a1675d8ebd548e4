// blowuplab: predict rates, run the moving-mesh flow, fit and compare.
#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <thread>

#include "blowup/analysis.hpp"
#include "blowup/coupling.hpp"
#include "blowup/error.hpp"
#include "blowup/params.hpp"
#include "blowup/profile.hpp"
#include "blowup/rates.hpp"
#include "blowup/run_io.hpp"
#include "blowup/spectral.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace blowup;

namespace {

enum Exit { Ok = 0, Failed = 1, Usage = 2, NoBlowupExit = 3 };

fs::path outRoot() {
  if (const char* e = std::getenv("BLOWUPLAB_OUT"); e && *e) return e;
  return "blowuplab-out";
}

std::string slug(std::string s) {
  for (auto& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  return s;
}

std::string num(double x, int digits = 10) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// ---- predict

struct PredictArgs {
  double d = 7;
  int k = 1, N = 1;
  bool json = false;
  std::string out;
};

int cmdPredict(const PredictArgs& a) {
  const ModelParams p{a.d, a.k, a.N};
  const auto dc = derive(p);
  const auto law = predictRate(p, a.N);

  json j = json::parse(rateLawJson(law, -1));
  j["d"] = a.d;
  j["k"] = a.k;
  j["K"] = dc.K;
  j["regime"] = toString(dc.regime);
  json spec = json::array();
  for (int n = 0; n <= a.N + 1; ++n) {
    const auto e = eigenvalue(dc, n);
    spec.push_back({{"n", n}, {"lambda", e.lambda}, {"beta", e.beta}});
  }
  j["spectrum"] = spec;
  const auto cl = classify(dc);
  j["minAdmissibleN"] = cl.minAdmissibleN;
  if (cl.neutralIndex) j["neutralIndex"] = *cl.neutralIndex;
  j["unstableDirections"] = cl.unstableDirections(a.N);

  if (!a.out.empty()) writeText(a.out, j.dump(2));
  if (a.json) {
    std::cout << j.dump(2) << "\n";
    return Ok;
  }
  std::cout << "d=" << a.d << " k=" << a.k << " N=" << a.N << "  regime " << toString(dc.regime) << "\n";
  std::cout << "  gamma   " << num(law.gamma) << "\n  omega   " << num(law.omega) << "\n  delta   " << num(law.delta)
            << "\n";
  for (const auto& e : spec)
    std::cout << "  lambda_" << e["n"].get<int>() << " " << num(e["lambda"].get<double>()) << "   beta "
              << num(e["beta"].get<double>()) << "\n";
  std::cout << "  h       " << num(law.h, 12) << "\n  C_s     " << num(law.Cs, 12) << "\n  c_N     " << num(law.cN, 12)
            << "\n";
  if (law.DN > 0) std::cout << "  D_N     " << num(law.DN, 12) << "\n";
  if (law.CN > 0) std::cout << "  C_N     " << num(law.CN, 12) << "\n";
  if (law.kind == RateKind::Power) {
    std::cout << "rate: Power, R(t) ~ C_s eps0 (T-t)^" << num(law.exponent, 8) << "  (beta_N = " << num(law.beta, 8)
              << ")\n";
  } else {
    std::cout << "rate: Logarithmic, R(t) = C sqrt(T-t) / (-log(T-t) - s0)^" << num(law.exponent, 6)
              << ",  C = C_s C_N = " << num(law.prefactor, 8) << "\n";
    std::cout << "      slope of sqrt(T-t) d_r u(0,t) in -log(T-t): 1/(C_s C_N) = " << num(law.gradientSlope, 8) << "\n";
  }
  return Ok;
}

// ---- simulate

struct SimArgs {
  std::string config;
  std::vector<std::string> sweep;
  int jobs = 0;
  std::string out, name;
  bool noFit = false;
  std::optional<double> d, L, rtol, atol, maxGradient, tMax;
  std::optional<int> k, M;
  std::optional<std::string> initial;
};

SimConfig buildConfig(const std::string& file, const SimArgs& a) {
  SimConfig c = file.empty() ? SimConfig{} : readConfig(file);
  if (a.d) c.d = *a.d;
  if (a.k) c.k = *a.k;
  if (a.L) c.L = *a.L;
  if (a.M) c.M = *a.M;
  if (a.rtol) c.rtol = *a.rtol;
  if (a.atol) c.atol = *a.atol;
  if (a.maxGradient) c.maxGradient = *a.maxGradient;
  if (a.tMax) c.tMax = *a.tMax;
  if (a.initial) c.initial.name = *a.initial;
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::BadConfig, e.what());
  }
  return c;
}

fs::path defaultRunDir(const SimConfig& c) {
  std::string base = "d" + num(c.d, 6) + "_k" + std::to_string(c.k) + "_" + slug(c.initial.name);
  return outRoot() / "runs" / (base + "_" + hexHash(configHash(c)).substr(0, 8));
}

struct SimOutcome {
  fs::path dir;
  std::string status, fitLine, error;
  int code = Ok;
};

SimOutcome simulateOne(const SimConfig& c, const fs::path& dir, bool fit, const std::string& command) {
  SimOutcome o;
  o.dir = dir;
  RunManifest m;
  m.command = command;
  m.started = nowUtc();
  const auto tr = run(c);
  m.finished = nowUtc();
  writeRunDirectory(dir, c, tr, m);
  o.status = tr.status;
  if (!fit) return o;
  if (!tr.reachedStop) {
    o.code = NoBlowupExit;
    o.fitLine = "NoBlowup";
    return o;
  }
  const ModelParams p{c.d, c.k, {}};
  const auto f = fitTrace(tr, p);
  writeText(dir / "fit.json", fitToJson(f));
  auto man = manifestFromJson(readText(dir / "manifest.json"));
  man.artifacts.push_back("fit.json");
  writeText(dir / "manifest.json", manifestToJson(man));
  if (f.kind == FitKind::PowerFit)
    o.fitLine = "PowerFit beta=" + num(f.beta, 7) + " +- " + num(f.uncertainty, 2) + " T=" + num(static_cast<double>(f.T), 12);
  else
    o.fitLine = "LogFit C=" + num(f.C, 7) + " s0=" + num(f.s0, 6) + " R2=" + num(f.r2, 9) +
                " T=" + num(static_cast<double>(f.T), 12);
  return o;
}

int cmdSimulate(const SimArgs& a, const std::string& command) {
  if (a.sweep.empty()) {
    const auto c = buildConfig(a.config, a);
    const fs::path dir = !a.out.empty() ? fs::path(a.out) : (!a.name.empty() ? outRoot() / "runs" / a.name : defaultRunDir(c));
    const auto o = simulateOne(c, dir, !a.noFit, command);
    std::cout << o.dir.string() << "  " << o.status << (o.fitLine.empty() ? "" : "  " + o.fitLine) << "\n";
    return o.code;
  }

  // each worker owns the run directories it creates
  std::vector<SimConfig> cfgs;
  for (const auto& f : a.sweep) cfgs.push_back(buildConfig(f, a));
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned jobs = a.jobs > 0 ? static_cast<unsigned>(a.jobs) : std::min<unsigned>(hw, cfgs.size());
  std::vector<SimOutcome> res(cfgs.size());
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i = next++; i < cfgs.size(); i = next++) {
      const fs::path base = a.out.empty() ? outRoot() / "runs" : fs::path(a.out);
      const fs::path dir = base / defaultRunDir(cfgs[i]).filename();
      try {
        res[i] = simulateOne(cfgs[i], dir, !a.noFit, command);
      } catch (const Error& e) {
        res[i].dir = dir;
        res[i].error = e.what();
        res[i].code = Failed;
      }
      std::lock_guard lk(io);
      std::cout << res[i].dir.string() << "  " << (res[i].error.empty() ? res[i].status + "  " + res[i].fitLine : res[i].error)
                << std::endl;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  int code = Ok;
  for (const auto& r : res) code = std::max(code, r.code);
  return code;
}

// ---- fit

int cmdFit(const std::string& dir, const std::string& kind) {
  const auto lr = readRunDirectory(dir);
  const ModelParams p{lr.config.d, lr.config.k, {}};
  if (!lr.trace.reachedStop) {
    std::cout << json{{"status", "NoBlowup"}}.dump(2) << "\n";
    return NoBlowupExit;
  }
  FitResult f;
  if (kind == "auto") {
    f = fitTrace(lr.trace, p);
  } else if (kind == "power") {
    f = fitPower(lr.trace.t, lr.trace.drU0);
  } else {
    LogFitOptions o;
    o.delta = derive(p).delta;
    f = fitLog(lr.trace.t, lr.trace.drU0, o);
  }
  const auto text = fitToJson(f);
  writeText(fs::path(dir) / "fit.json", text);
  std::cout << text << "\n";
  return Ok;
}

// ---- compare

int cmdCompare(const std::vector<std::string>& dirs, const std::string& out) {
  std::vector<CompareReport> reports;
  std::vector<std::string> names;
  int code = Ok;
  for (const auto& d : dirs) {
    const auto lr = readRunDirectory(d);
    const ModelParams p{lr.config.d, lr.config.k, {}};
    auto r = compareRun(lr.trace, p);
    names.push_back(fs::path(d).filename().string());
    if (r.status == "NoBlowup") code = std::max<int>(code, NoBlowupExit);
    else if (!r.fit) code = std::max<int>(code, Failed);

    if (r.fit) {
      std::ofstream lp(fs::path(d) / "logplot.csv");
      lp << "x,y\n";
      lp.precision(12);
      for (const auto& row : logPlot(lr.trace, r.fit->T)) lp << row.x << ',' << row.y << '\n';
      std::ofstream ov(fs::path(d) / "overlay.csv");
      ov << "s,eps,y,f,f_ansatz\n";
      ov.precision(12);
      for (const auto& o : r.overlays)
        for (std::size_t i = 0; i < o.y.size(); ++i)
          ov << o.s << ',' << o.eps << ',' << o.y[i] << ',' << o.f[i] << ',' << o.fAnsatz[i] << '\n';
    }
    reports.push_back(std::move(r));
  }
  const auto text = compareJson(reports, names);
  const fs::path target = !out.empty() ? fs::path(out) : (dirs.size() == 1 ? fs::path(dirs[0]) / "compare.json" : outRoot() / "compare.json");
  writeText(target, text);
  std::cout << text << "\n";
  return code;
}

// ---- dumps

int cmdProfileDump(double d, int k, const std::string& out) {
  const auto sol = solveProfile({d, k, {}});
  const fs::path target = out.empty() ? outRoot() / ("profile_d" + num(d, 6) + "_k" + std::to_string(k) + ".csv") : fs::path(out);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::ofstream f(target);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + target.string());
  writeOrbitCsv(sol, f);
  std::cout << json{{"file", target.string()}, {"h", sol.h}, {"Cs", sol.Cs}, {"fitResidual", sol.fitResidual}}.dump(2) << "\n";
  return Ok;
}

int cmdBasisDump(double d, int k, int maxN, double yMax, const std::string& out) {
  const auto b = buildBasis({d, k, {}}, maxN);
  const fs::path target = out.empty() ? outRoot() / ("basis_d" + num(d, 6) + "_k" + std::to_string(k) + ".csv") : fs::path(out);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::ofstream f(target);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + target.string());
  writeBasisCsv(b, f, 0.05, yMax);
  std::cout << json{{"file", target.string()}, {"orthoResidual", b.orthoResidual}, {"cOrigin", b.cOrigin}}.dump(2) << "\n";
  return Ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"blowuplab: type-II blow-up of the corotational harmonic map heat flow"};
  app.require_subcommand(1);

  PredictArgs pa;
  auto* predict = app.add_subcommand("predict", "asymptotic blow-up rate and constants");
  predict->add_option("--d", pa.d, "dimension")->default_val(7.0);
  predict->add_option("--k", pa.k, "corotation index")->default_val(1);
  predict->add_option("--N", pa.N, "blow-up mode")->default_val(1);
  predict->add_flag("--json", pa.json, "print JSON only");
  predict->add_option("--out", pa.out, "also write the JSON here");

  SimArgs sa;
  auto* simulate = app.add_subcommand("simulate", "run the moving-mesh solver and fit the trace");
  simulate->add_option("config", sa.config, "JSON config");
  simulate->add_option("--sweep", sa.sweep, "several configs, run concurrently")->expected(1, -1);
  simulate->add_option("--jobs", sa.jobs, "worker threads for --sweep");
  simulate->add_option("--out", sa.out, "run directory (sweep: parent directory)");
  simulate->add_option("--name", sa.name, "run directory name under $BLOWUPLAB_OUT/runs");
  simulate->add_flag("--no-fit", sa.noFit, "skip the fit stage");
  simulate->add_option("--d", sa.d);
  simulate->add_option("--k", sa.k);
  simulate->add_option("--L", sa.L, "domain length");
  simulate->add_option("--M", sa.M, "mesh nodes");
  simulate->add_option("--initial", sa.initial, "r, r+sin(r) or r-sin(r)");
  simulate->add_option("--rtol", sa.rtol);
  simulate->add_option("--atol", sa.atol);
  simulate->add_option("--max-gradient", sa.maxGradient);
  simulate->add_option("--t-max", sa.tMax);

  std::string fitDir, fitKind = "auto";
  auto* fit = app.add_subcommand("fit", "fit a stored run");
  fit->add_option("run", fitDir)->required();
  fit->add_option("--kind", fitKind)->check(CLI::IsMember({"auto", "power", "log"}));

  std::vector<std::string> cmpDirs;
  std::string cmpOut;
  auto* compare = app.add_subcommand("compare", "prediction against fitted runs, plus plot data");
  compare->add_option("runs", cmpDirs)->required()->expected(1, -1);
  compare->add_option("--out", cmpOut, "report path");

  double pd = 7;
  int pk = 1;
  std::string pOut;
  auto* pdump = app.add_subcommand("profile-dump", "harmonic map orbit as CSV");
  pdump->add_option("--d", pd)->default_val(7.0);
  pdump->add_option("--k", pk)->default_val(1);
  pdump->add_option("--out", pOut);

  double bd = 7, yMax = 20;
  int bk = 1, maxN = 4;
  std::string bOut;
  auto* bdump = app.add_subcommand("basis-dump", "eigenfunctions as CSV");
  bdump->add_option("--d", bd)->default_val(7.0);
  bdump->add_option("--k", bk)->default_val(1);
  bdump->add_option("--max-n", maxN)->default_val(4);
  bdump->add_option("--y-max", yMax)->default_val(20.0);
  bdump->add_option("--out", bOut);

  CLI11_PARSE(app, argc, argv);

  std::string command;
  for (int i = 1; i < argc; ++i) command += (i > 1 ? " " : "") + std::string(argv[i]);

  try {
    if (*predict) return cmdPredict(pa);
    if (*simulate) return cmdSimulate(sa, command);
    if (*fit) return cmdFit(fitDir, fitKind);
    if (*compare) return cmdCompare(cmpDirs, cmpOut);
    if (*pdump) return cmdProfileDump(pd, pk, pOut);
    if (*bdump) return cmdBasisDump(bd, bk, maxN, yMax, bOut);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::BadConfig ? Usage : e.kind() == ErrorKind::NoBlowup ? NoBlowupExit : Failed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Failed;
  }
  return Ok;
}
