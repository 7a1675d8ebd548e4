#include "blowup/run_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "blowup/error.hpp"

namespace blowup {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

json toJson(const SimConfig& c) {
  json j;
  j["d"] = c.d;
  j["k"] = c.k;
  j["L"] = c.L;
  if (c.initial.name == "tabulated")
    j["initial"] = {{"name", "tabulated"}, {"r", c.initial.r}, {"u", c.initial.u}};
  else
    j["initial"] = c.initial.name;
  j["M"] = c.M;
  j["meshRelax"] = c.meshRelax;
  j["meshMaxShift"] = c.meshMaxShift;
  j["rtol"] = c.rtol;
  j["atol"] = c.atol;
  j["dt0"] = c.dt0;
  j["maxGradient"] = c.maxGradient;
  j["tMax"] = c.tMax;
  j["maxSteps"] = c.maxSteps;
  j["snapshotGradients"] = c.snapshotGradients;
  j["snapshotTimes"] = c.snapshotTimes;
  return j;
}

template <class T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::BadConfig, std::string("bad value for '") + key + "'");
  }
}

// doubles written so that they read back bit-identical
std::string exact(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string exactLong(long double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.21Lg", x);
  return buf;
}

std::vector<std::string> splitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double toDouble(const std::string& s, const fs::path& p) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() && s.find_first_not_of(" \r", pos) != std::string::npos) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Io, p.string() + ": bad number '" + s + "'");
  }
}

json fitJson(const FitResult& f) {
  json j;
  j["kind"] = toString(f.kind);
  j["T"] = exactLong(f.T);
  j["deltaT"] = f.deltaT;
  if (f.kind == FitKind::PowerFit) {
    j["beta"] = f.beta;
    j["exponent"] = f.exponent;
  } else {
    j["C"] = f.C;
    j["s0"] = f.s0;
    j["delta"] = f.delta;
  }
  j["uncertainty"] = f.uncertainty;
  j["residual"] = f.residual;
  j["R2"] = f.r2;
  j["window"] = {exactLong(f.windowStart), exactLong(f.windowEnd)};
  j["nPoints"] = f.nPoints;
  return j;
}

}  // namespace

SimConfig configFromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::BadConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::BadConfig, "config must be a JSON object");
  static const std::set<std::string> known{"d",   "k",    "L",   "initial",     "M",    "meshRelax",
                                           "meshMaxShift", "rtol", "atol", "dt0", "maxGradient", "tMax",
                                           "maxSteps", "snapshotGradients", "snapshotTimes"};
  for (const auto& [key, v] : j.items())
    if (!known.count(key)) throw Error(ErrorKind::BadConfig, "unknown config key '" + key + "'");

  SimConfig c;
  take(j, "d", c.d);
  take(j, "k", c.k);
  take(j, "L", c.L);
  if (j.contains("initial")) {
    const auto& ini = j["initial"];
    if (ini.is_string()) {
      c.initial.name = ini.get<std::string>();
    } else if (ini.is_object()) {
      take(ini, "name", c.initial.name);
      take(ini, "r", c.initial.r);
      take(ini, "u", c.initial.u);
    } else {
      throw Error(ErrorKind::BadConfig, "'initial' must be a name or an object");
    }
  }
  take(j, "M", c.M);
  take(j, "meshRelax", c.meshRelax);
  take(j, "meshMaxShift", c.meshMaxShift);
  take(j, "rtol", c.rtol);
  take(j, "atol", c.atol);
  take(j, "dt0", c.dt0);
  take(j, "maxGradient", c.maxGradient);
  take(j, "tMax", c.tMax);
  take(j, "maxSteps", c.maxSteps);
  take(j, "snapshotGradients", c.snapshotGradients);
  take(j, "snapshotTimes", c.snapshotTimes);
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::BadConfig, e.what());
  }
  return c;
}

std::string configToJson(const SimConfig& cfg, int indent) { return toJson(cfg).dump(indent); }

SimConfig readConfig(const fs::path& p) { return configFromJson(readText(p)); }

std::uint64_t configHash(const SimConfig& cfg) {
  const auto s = toJson(cfg).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hexHash(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void writeTraceCsv(const fs::path& p, const RunTrace& tr) {
  std::ofstream f(p);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + p.string());
  f << "t,dr_u0,sup_grad,energy,min_dx\n";
  for (std::size_t i = 0; i < tr.size(); ++i)
    f << exactLong(tr.t[i]) << ',' << exact(tr.drU0[i]) << ',' << exact(tr.supGrad[i]) << ',' << exact(tr.energy[i])
      << ',' << exact(tr.minDx[i]) << '\n';
}

RunTrace readTraceCsv(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw Error(ErrorKind::Io, "cannot read " + p.string());
  std::string line;
  std::getline(f, line);
  if (line.rfind("t,dr_u0,sup_grad,energy,min_dx", 0) != 0) throw Error(ErrorKind::Io, p.string() + ": unexpected header");
  RunTrace tr;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto c = splitCsv(line);
    if (c.size() < 5) throw Error(ErrorKind::Io, p.string() + ": short row");
    tr.t.push_back(std::strtold(c[0].c_str(), nullptr));
    tr.drU0.push_back(toDouble(c[1], p));
    tr.supGrad.push_back(toDouble(c[2], p));
    tr.energy.push_back(toDouble(c[3], p));
    tr.minDx.push_back(toDouble(c[4], p));
  }
  return tr;
}

void writeSnapshot(const fs::path& dir, int index, const Snapshot& s) {
  fs::create_directories(dir);
  char stem[16];
  std::snprintf(stem, sizeof stem, "%03d", index);
  {
    std::ofstream f(dir / (std::string(stem) + ".csv"));
    if (!f) throw Error(ErrorKind::Io, "cannot write snapshot in " + dir.string());
    f << "r,u\n";
    for (std::size_t i = 0; i < s.r.size(); ++i) f << exact(s.r[i]) << ',' << exact(s.u[i]) << '\n';
  }
  json j{{"t", exactLong(s.t)},
         {"reason", s.reason},
         {"dr_u0", s.drU0},
         {"sup_grad", s.supGrad},
         {"sup_location", s.supLocation},
         {"nodes", s.r.size()}};
  writeText(dir / (std::string(stem) + ".json"), j.dump(2));
}

std::vector<Snapshot> readSnapshots(const fs::path& dir) {
  std::vector<fs::path> metas;
  if (!fs::exists(dir)) return {};
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") metas.push_back(e.path());
  std::sort(metas.begin(), metas.end());
  std::vector<Snapshot> out;
  for (const auto& m : metas) {
    Snapshot s;
    try {
      const auto j = json::parse(readText(m));
      s.t = std::strtold(j.at("t").get<std::string>().c_str(), nullptr);
      s.reason = j.at("reason").get<std::string>();
      s.drU0 = j.at("dr_u0").get<double>();
      s.supGrad = j.at("sup_grad").get<double>();
      s.supLocation = j.at("sup_location").get<double>();
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Io, m.string() + ": " + e.what());
    }
    auto csv = m;
    csv.replace_extension(".csv");
    std::ifstream f(csv);
    if (!f) throw Error(ErrorKind::Io, "missing " + csv.string());
    std::string line;
    std::getline(f, line);
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      const auto c = splitCsv(line);
      if (c.size() < 2) throw Error(ErrorKind::Io, csv.string() + ": short row");
      s.r.push_back(toDouble(c[0], csv));
      s.u.push_back(toDouble(c[1], csv));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string fitToJson(const FitResult& f, int indent) { return fitJson(f).dump(indent); }

FitResult fitFromJson(const std::string& text) {
  FitResult f;
  try {
    const auto j = json::parse(text);
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "PowerFit")
      f.kind = FitKind::PowerFit;
    else if (kind == "LogFit")
      f.kind = FitKind::LogFit;
    else
      throw Error(ErrorKind::BadConfig, "unknown fit kind '" + kind + "'");
    f.T = std::strtold(j.at("T").get<std::string>().c_str(), nullptr);
    f.deltaT = j.at("deltaT").get<double>();
    if (f.kind == FitKind::PowerFit) {
      f.beta = j.at("beta").get<double>();
      f.exponent = j.at("exponent").get<double>();
    } else {
      f.C = j.at("C").get<double>();
      f.s0 = j.at("s0").get<double>();
      f.delta = j.at("delta").get<double>();
    }
    f.uncertainty = j.at("uncertainty").get<double>();
    f.residual = j.at("residual").get<double>();
    f.r2 = j.at("R2").get<double>();
    f.windowStart = std::strtold(j.at("window").at(0).get<std::string>().c_str(), nullptr);
    f.windowEnd = std::strtold(j.at("window").at(1).get<std::string>().c_str(), nullptr);
    f.nPoints = j.at("nPoints").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadConfig, std::string("bad fit JSON: ") + e.what());
  }
  return f;
}

std::string manifestToJson(const RunManifest& m, int indent) {
  json j;
  j["command"] = m.command;
  j["configHash"] = m.configHash;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["artifacts"] = m.artifacts;
  j["versions"] = m.versions;
  j["status"] = m.status;
  j["steps"] = m.steps;
  j["rejected"] = m.rejected;
  j["maxEnergyIncrease"] = m.maxEnergyIncrease;
  j["minLayerNodes"] = m.minLayerNodes;
  return j.dump(indent);
}

RunManifest manifestFromJson(const std::string& text) {
  RunManifest m;
  try {
    const auto j = json::parse(text);
    m.command = j.at("command").get<std::string>();
    m.configHash = j.at("configHash").get<std::string>();
    m.started = j.value("started", "");
    m.finished = j.value("finished", "");
    m.artifacts = j.value("artifacts", std::vector<std::string>{});
    m.versions = j.value("versions", std::map<std::string, std::string>{});
    m.status = j.value("status", "");
    m.steps = j.value("steps", 0L);
    m.rejected = j.value("rejected", 0L);
    m.maxEnergyIncrease = j.value("maxEnergyIncrease", 0.0);
    m.minLayerNodes = j.value("minLayerNodes", 0);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("bad manifest: ") + e.what());
  }
  return m;
}

std::string nowUtc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string libraryVersion() { return "0.1.0"; }

void writeRunDirectory(const fs::path& dir, const SimConfig& cfg, const RunTrace& tr, RunManifest m) {
  fs::create_directories(dir);
  writeText(dir / "config.json", configToJson(cfg));
  writeTraceCsv(dir / "trace.csv", tr);
  m.artifacts = {"config.json", "trace.csv"};
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    writeSnapshot(dir / "snapshots", static_cast<int>(i), tr.snapshots[i]);
    char stem[32];
    std::snprintf(stem, sizeof stem, "snapshots/%03zu", i);
    m.artifacts.push_back(std::string(stem) + ".csv");
    m.artifacts.push_back(std::string(stem) + ".json");
  }
  m.configHash = hexHash(configHash(cfg));
  m.status = tr.status;
  m.steps = tr.steps;
  m.rejected = tr.rejected;
  m.maxEnergyIncrease = tr.maxEnergyIncrease;
  m.minLayerNodes = tr.minLayerNodes;
  m.versions["blowup"] = libraryVersion();
  writeText(dir / "manifest.json", manifestToJson(m));
}

LoadedRun readRunDirectory(const fs::path& dir) {
  LoadedRun run;
  run.config = readConfig(dir / "config.json");
  run.trace = readTraceCsv(dir / "trace.csv");
  run.trace.snapshots = readSnapshots(dir / "snapshots");
  if (fs::exists(dir / "manifest.json")) {
    run.manifest = manifestFromJson(readText(dir / "manifest.json"));
    run.trace.status = run.manifest.status;
    run.trace.steps = run.manifest.steps;
    run.trace.rejected = run.manifest.rejected;
    run.trace.maxEnergyIncrease = run.manifest.maxEnergyIncrease;
    run.trace.minLayerNodes = run.manifest.minLayerNodes;
  }
  run.trace.reachedStop = run.trace.status == "Blowup";
  return run;
}

std::string readText(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot read " + p.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void writeText(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + p.string());
  f << text;
  if (text.empty() || text.back() != '\n') f << '\n';
}

}  // namespace blowup
