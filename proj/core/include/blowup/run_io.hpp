#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "blowup/fitting.hpp"
#include "blowup/meshsim.hpp"

namespace blowup {

// JSON config with the SimConfig field names. Missing keys keep their defaults,
// unknown keys and wrong types throw BadConfig.
SimConfig configFromJson(const std::string& text);
std::string configToJson(const SimConfig& cfg, int indent = 2);
SimConfig readConfig(const std::filesystem::path& p);

// FNV-1a over the compact JSON form
std::uint64_t configHash(const SimConfig& cfg);
std::string hexHash(std::uint64_t h);

// trace.csv: t,dr_u0,sup_grad,energy,min_dx (t with 21 significant digits)
void writeTraceCsv(const std::filesystem::path& p, const RunTrace& tr);
RunTrace readTraceCsv(const std::filesystem::path& p);

// snapshots/NNN.csv with r,u plus NNN.json metadata
void writeSnapshot(const std::filesystem::path& dir, int index, const Snapshot& s);
std::vector<Snapshot> readSnapshots(const std::filesystem::path& dir);

std::string fitToJson(const FitResult& f, int indent = 2);
FitResult fitFromJson(const std::string& text);

struct RunManifest {
  std::string command;
  std::string configHash;
  std::string started, finished;  // ISO-8601 UTC
  std::vector<std::string> artifacts;  // relative to the run directory
  std::map<std::string, std::string> versions;
  // run summary
  std::string status;
  long steps = 0, rejected = 0;
  double maxEnergyIncrease = 0;
  int minLayerNodes = 0;
};

std::string manifestToJson(const RunManifest& m, int indent = 2);
RunManifest manifestFromJson(const std::string& text);
std::string nowUtc();
std::string libraryVersion();

// Layout: config.json, trace.csv, snapshots/, manifest.json (fit.json is added by the fit stage).
void writeRunDirectory(const std::filesystem::path& dir, const SimConfig& cfg, const RunTrace& tr, RunManifest m);

struct LoadedRun {
  SimConfig config;
  RunTrace trace;  // status and counters restored from the manifest
  RunManifest manifest;
};
LoadedRun readRunDirectory(const std::filesystem::path& dir);

std::string readText(const std::filesystem::path& p);
void writeText(const std::filesystem::path& p, const std::string& text);

}  // namespace blowup
