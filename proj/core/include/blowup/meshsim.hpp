#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blowup/params.hpp"
#include "blowup/rosenbrock.hpp"

namespace blowup {

struct InitialData {
  std::string name = "r";   // "r", "r+sin(r)", "r-sin(r)" or "tabulated"
  std::vector<double> r, u; // only for "tabulated"

  double operator()(double r) const;
  void validate() const;  // BadInitialData if u(0) != 0 or the name is unknown
};

struct SimConfig {
  double d = 8.0;
  int k = 1;
  double L = 3.14159265358979323846;  // Dirichlet u(L,t) = u(L,0)
  InitialData initial;
  int M = 401;     // nodes including both ends
  // mesh: r_j = R sinh(A eta_j), A = asinh(L/R), R relaxed towards the layer width
  double meshRelax = 1.0;     // lag time of log R in units of R^2
  double meshMaxShift = 0.5;  // cap on the log R gap used per step
  double rtol = 1e-7, atol = 1e-10;
  double dt0 = 1e-7;
  double maxGradient = 1e8;
  double tMax = 10.0;
  long maxSteps = 2'000'000;
  std::vector<double> snapshotGradients{1e3, 3e3, 1e4, 3e4, 1e5, 3e5, 1e6, 3e6, 1e7, 3e7};
  std::vector<double> snapshotTimes;

  void validate() const;  // InvalidArgument on bad values
};

struct MeshState {
  long double t = 0;
  double logR = 0;
  std::vector<double> r, u;  // full mesh, r[0] = 0, r[M-1] = L
};

struct Snapshot {
  long double t = 0;
  std::string reason;
  double drU0 = 0, supGrad = 0, supLocation = 0;
  std::vector<double> r, u;
};

struct RunTrace {
  std::vector<long double> t;
  std::vector<double> drU0, supGrad, energy, minDx, meshScale;
  std::vector<Snapshot> snapshots;
  bool reachedStop = false;  // sup|u_r| >= maxGradient
  std::string status;        // "Blowup" or "NoBlowup"
  long steps = 0, rejected = 0;
  double maxEnergyIncrease = 0;  // largest relative per-step increase of E
  int minLayerNodes = 0;         // fewest nodes in r <= 5 R over the run
  std::size_t size() const { return t.size(); }
};

std::vector<double> meshNodes(double logR, double L, int M);

MeshState initialize(const SimConfig& cfg);

struct Observables {
  double drU0 = 0;     // k=1: u_r(0); general k: lim u/r^k
  double supGrad = 0;  // max of drU0 (k=1) and |u_r| at the nodes
  double supLocation = 0;
  double energy = 0;
  double minDx = 0;
  int layerNodes = 0;
};

Observables observe(const SimConfig& cfg, const MeshState& s);

class MeshSolver {
 public:
  explicit MeshSolver(SimConfig cfg);
  MeshSolver(SimConfig cfg, MeshState start);

  const MeshState& state() const { return state_; }
  const SimConfig& config() const { return cfg_; }
  double dt() const { return dt_; }
  long rejected() const { return rejected_; }

  // One accepted step (retries internally). StepSizeUnderflow/MeshTangling on failure.
  void step();

  // Right-hand side for a given interior u and log R with a prescribed mesh velocity.
  void rhs(const std::vector<double>& y, std::vector<double>& f) const;
  void factor(double hg);
  void solve(std::vector<double>& b) const;

 private:
  double targetLogR() const;

  SimConfig cfg_;
  DerivedConstants dc_;
  MeshState state_;
  double dt_ = 0;
  double vm_ = 0;  // d log R / dt within the current step
  long rejected_ = 0;
  double uL_ = 0;
  // factorisation of W
  double hg_ = 0;
  Pentadiagonal w_;
  std::vector<double> jum_;
};

using StepObserver = std::function<void(const MeshState&, const Observables&)>;

RunTrace run(const SimConfig& cfg, const StepObserver& onStep = {});

struct SelfSimilarSnapshot {
  double s = 0;  // -log(T-t)
  std::vector<double> y, f;
};

SelfSimilarSnapshot toSelfSimilar(const Snapshot& snap, long double T);
// Monotone cubic interpolation of the snapshot in y; f(0) = 0 and constant beyond the last node.
std::function<double(double)> snapshotInterpolant(const SelfSimilarSnapshot& s);

}  // namespace blowup
