#include "blowup/meshsim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
// boost 1.74's pchip calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <memory>
#include <sstream>

#include "blowup/error.hpp"
#include "blowup/rosenbrock.hpp"

namespace blowup {

double InitialData::operator()(double x) const {
  if (name == "r") return x;
  if (name == "r+sin(r)") return x + std::sin(x);
  if (name == "r-sin(r)") return x - std::sin(x);
  if (name == "tabulated") {
    if (x <= r.front()) return u.front();
    if (x >= r.back()) return u.back();
    const auto it = std::upper_bound(r.begin(), r.end(), x);
    const std::size_t i = it - r.begin();
    const double w = (x - r[i - 1]) / (r[i] - r[i - 1]);
    return (1.0 - w) * u[i - 1] + w * u[i];
  }
  throw Error(ErrorKind::BadInitialData, "unknown initial data '" + name + "'");
}

void InitialData::validate() const {
  if (name == "r" || name == "r+sin(r)" || name == "r-sin(r)") return;
  if (name != "tabulated") throw Error(ErrorKind::BadInitialData, "unknown initial data '" + name + "'");
  if (r.size() < 2 || r.size() != u.size()) throw Error(ErrorKind::BadInitialData, "tabulated data needs matching r and u");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw Error(ErrorKind::BadInitialData, "tabulated r must be strictly increasing");
  if (r.front() != 0.0 || std::abs(u.front()) > 1e-14)
    throw Error(ErrorKind::BadInitialData, "regularity requires u(0) = 0");
}

void SimConfig::validate() const {
  derive({d, k, {}});
  auto bad = [](const std::string& m) { throw Error(ErrorKind::InvalidArgument, m); };
  if (!(L > 0.0)) bad("L must be positive");
  if (M < 64) bad("M must be at least 64");
  if (!(maxGradient >= 1e6)) bad("maxGradient must be at least 1e6");
  if (!(rtol > 0.0 && atol > 0.0)) bad("tolerances must be positive");
  if (!(meshRelax > 0.0)) bad("meshRelax must be positive");
  if (!(meshMaxShift > 0.0)) bad("meshMaxShift must be positive");
  if (!(dt0 > 0.0 && tMax > 0.0)) bad("dt0 and tMax must be positive");
  initial.validate();
  if (initial.name == "tabulated" && initial.r.back() < L) bad("tabulated data must cover [0, L]");
}

std::vector<double> meshNodes(double logR, double L, int M) {
  const double R = std::exp(logR), A = std::asinh(L / R);
  std::vector<double> r(M);
  for (int j = 0; j < M; ++j) r[j] = R * std::sinh(A * j / (M - 1.0));
  r[0] = 0.0;
  r[M - 1] = L;
  return r;
}

namespace {

std::vector<double> meshNodesDerivative(double logR, double L, int M) {
  const double R = std::exp(logR), A = std::asinh(L / R);
  const double x = L / R, dA = -x / std::sqrt(1.0 + x * x);
  std::vector<double> d(M);
  for (int j = 0; j < M; ++j) {
    const double eta = j / (M - 1.0);
    d[j] = R * std::sinh(A * eta) + R * std::cosh(A * eta) * eta * dA;
  }
  d[0] = d[M - 1] = 0.0;
  return d;
}

// u/r^k extrapolated to r=0 by a quadratic in r^2 through nodes 1..3
double originCoefficient(const std::vector<double>& r, const std::vector<double>& u, int k) {
  double rho[3], q[3];
  for (int i = 0; i < 3; ++i) {
    rho[i] = r[i + 1] * r[i + 1];
    q[i] = u[i + 1] / std::pow(r[i + 1], k);
  }
  double c = 0.0;
  for (int i = 0; i < 3; ++i) {
    double l = 1.0;
    for (int j = 0; j < 3; ++j)
      if (j != i) l *= (0.0 - rho[j]) / (rho[i] - rho[j]);
    c += l * q[i];
  }
  return c;
}

double clampLogR(double logR, double L) { return std::min(logR, std::log(L)); }

}  // namespace

namespace {

// Weights on u_{j-2..j+2} for u_r and u_rr at node j: fourth order in eta, second order next to r = L.
struct Stencil {
  std::array<double, 5> dr{}, drr{};
};

Stencil stencilAt(int j, int M, double R, double A) {
  const double h = 1.0 / (M - 1.0), eta = j * h;
  const double re = R * A * std::cosh(A * eta), ree = R * A * A * std::sinh(A * eta);
  std::array<double, 5> d1, d2;
  if (j < M - 2) {
    d1 = {1.0 / (12 * h), -8.0 / (12 * h), 0.0, 8.0 / (12 * h), -1.0 / (12 * h)};
    d2 = {-1.0 / (12 * h * h), 16.0 / (12 * h * h), -30.0 / (12 * h * h), 16.0 / (12 * h * h), -1.0 / (12 * h * h)};
  } else {
    d1 = {0.0, -0.5 / h, 0.0, 0.5 / h, 0.0};
    d2 = {0.0, 1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h), 0.0};
  }
  Stencil s;
  for (int o = 0; o < 5; ++o) {
    s.dr[o] = d1[o] / re;
    s.drr[o] = (d2[o] - ree * d1[o] / re) / (re * re);
  }
  return s;
}

}  // namespace

MeshState initialize(const SimConfig& cfg) {
  cfg.validate();
  MeshState s;
  // iterate the layer-width estimate on its own mesh
  double logR = std::log(cfg.L);
  for (int it = 0; it < 20; ++it) {
    const auto r = meshNodes(logR, cfg.L, cfg.M);
    std::vector<double> u(4);
    for (int j = 1; j < 4; ++j) u[j] = cfg.initial(r[j]);
    const double a = originCoefficient(r, u, cfg.k);
    const double next = a > 0.0 ? clampLogR(-std::log(a) / cfg.k, cfg.L) : std::log(cfg.L);
    if (std::abs(next - logR) < 1e-12) break;
    logR = next;
  }
  s.logR = logR;
  s.r = meshNodes(logR, cfg.L, cfg.M);
  s.u.resize(cfg.M);
  for (int j = 0; j < cfg.M; ++j) s.u[j] = cfg.initial(s.r[j]);
  s.u[0] = 0.0;
  return s;
}

Observables observe(const SimConfig& cfg, const MeshState& s) {
  const int M = static_cast<int>(s.r.size());
  const auto& r = s.r;
  const auto& u = s.u;
  const auto dc = derive({cfg.d, cfg.k, {}});
  Observables o;
  o.drU0 = originCoefficient(r, u, cfg.k);

  // |u_r| at the nodes with the solver's stencils
  const double R = std::exp(s.logR), A = std::asinh(cfg.L / R), h = 1.0 / (M - 1.0);
  const double parity = cfg.k % 2 == 0 ? 1.0 : -1.0;
  double best = cfg.k == 1 ? std::abs(o.drU0) : 0.0, bestLoc = 0.0;
  o.minDx = INFINITY;
  for (int j = 0; j + 1 < M; ++j) o.minDx = std::min(o.minDx, r[j + 1] - r[j]);
  for (int j = 1; j + 1 < M; ++j) {
    double ur = 0.0;
    if (j < M - 2) {
      const auto st = stencilAt(j, M, R, A);
      for (int q = -2; q <= 2; ++q) {
        const int i = j + q;
        ur += st.dr[q + 2] * (i < 0 ? parity * u[-i] : u[i]);
      }
    } else {
      // quartic through the last five nodes
      for (int i = M - 5; i < M; ++i) {
        double w = 0.0;
        for (int m = M - 5; m < M; ++m) {
          if (m == i) continue;
          double p = 1.0 / (r[i] - r[m]);
          for (int q = M - 5; q < M; ++q)
            if (q != i && q != m) p *= (r[j] - r[q]) / (r[i] - r[q]);
          w += p;
        }
        ur += w * u[i];
      }
    }
    // ties (u = r has u_r = 1 everywhere) stay at the origin
    if (std::abs(ur) > best * (1.0 + 1e-9)) {
      best = std::abs(ur);
      bestLoc = r[j];
    }
  }
  o.supGrad = best;
  o.supLocation = bestLoc;

  const double Rlayer = o.drU0 > 0.0 ? std::pow(o.drU0, -1.0 / cfg.k) : cfg.L;
  for (int j = 1; j < M; ++j)
    if (r[j] <= 5.0 * Rlayer) ++o.layerNodes;

  // E = 1/2 int (u_r^2 + K sin^2 u / r^2) r^{d-1} dr on the uniform eta grid
  std::vector<double> e(M, 0.0);
  for (int j = 1; j < M; ++j) {
    double ue;
    if (j == 1)
      ue = (-3 * u[0] - 10 * u[1] + 18 * u[2] - 6 * u[3] + u[4]) / (12 * h);
    else if (j == M - 2)
      ue = (3 * u[M - 1] + 10 * u[M - 2] - 18 * u[M - 3] + 6 * u[M - 4] - u[M - 5]) / (12 * h);
    else if (j == M - 1)
      ue = (25 * u[M - 1] - 48 * u[M - 2] + 36 * u[M - 3] - 16 * u[M - 4] + 3 * u[M - 5]) / (12 * h);
    else
      ue = (u[j - 2] - 8 * u[j - 1] + 8 * u[j + 1] - u[j + 2]) / (12 * h);
    const double re = R * A * std::cosh(A * j * h);
    const double ur = ue / re, sn = std::sin(u[j]);
    e[j] = 0.5 * (ur * ur + dc.K * sn * sn / (r[j] * r[j])) * std::pow(r[j], cfg.d - 1.0) * re;
  }
  const int intervals = M - 1;
  const int simpsonEnd = intervals % 2 == 0 ? intervals : intervals - 3;
  double E = 0.0;
  for (int j = 0; j < simpsonEnd; j += 2) E += h / 3.0 * (e[j] + 4 * e[j + 1] + e[j + 2]);
  if (simpsonEnd != intervals) {
    const int j = simpsonEnd;
    E += 3.0 * h / 8.0 * (e[j] + 3 * e[j + 1] + 3 * e[j + 2] + e[j + 3]);
  }
  o.energy = E;
  return o;
}

MeshSolver::MeshSolver(SimConfig cfg) : MeshSolver(cfg, initialize(cfg)) {}

MeshSolver::MeshSolver(SimConfig cfg, MeshState start)
    : cfg_(std::move(cfg)), dc_(derive({cfg_.d, cfg_.k, {}})), state_(std::move(start)), dt_(cfg_.dt0) {
  uL_ = state_.u.back();
  if (state_.u.front() != 0.0) throw Error(ErrorKind::BadInitialData, "u(0) must vanish");
}

double MeshSolver::targetLogR() const {
  const double a = originCoefficient(state_.r, state_.u, cfg_.k);
  if (!(a > 0.0)) return std::log(cfg_.L);
  return clampLogR(-std::log(a) / cfg_.k, cfg_.L);
}

void MeshSolver::rhs(const std::vector<double>& y, std::vector<double>& f) const {
  const int M = cfg_.M, n = M - 2;
  const double m = y[n], R = std::exp(m), A = std::asinh(cfg_.L / R);
  const auto r = meshNodes(m, cfg_.L, M);
  const auto drdm = meshNodesDerivative(m, cfg_.L, M);
  const double parity = cfg_.k % 2 == 0 ? 1.0 : -1.0;  // u is odd in r for odd k
  f.resize(n + 1);
  auto U = [&](int i) {
    if (i < 0) return parity * y[-i - 1];
    if (i == 0) return 0.0;
    if (i == M - 1) return uL_;
    return y[i - 1];
  };
  for (int j = 1; j <= n; ++j) {
    const auto st = stencilAt(j, M, R, A);
    double ur = 0.0, urr = 0.0;
    for (int o = -2; o <= 2; ++o) {
      if (st.dr[o + 2] == 0.0 && st.drr[o + 2] == 0.0) continue;
      const double v = U(j + o);
      ur += st.dr[o + 2] * v;
      urr += st.drr[o + 2] * v;
    }
    const double coef = (cfg_.d - 1.0) / r[j] + drdm[j] * vm_;
    f[j - 1] = urr + coef * ur - dc_.K * std::sin(2.0 * y[j - 1]) / (2.0 * r[j] * r[j]);
  }
  f[n] = vm_;
}

void MeshSolver::factor(double hg) {
  const int M = cfg_.M, n = M - 2;
  hg_ = hg;
  const auto& r = state_.r;
  const double R = std::exp(state_.logR), A = std::asinh(cfg_.L / R);
  const auto drdm = meshNodesDerivative(state_.logR, cfg_.L, M);
  const double parity = cfg_.k % 2 == 0 ? 1.0 : -1.0;
  w_.resize(n);
  for (int j = 1; j <= n; ++j) {
    const auto st = stencilAt(j, M, R, A);
    const double coef = (cfg_.d - 1.0) / r[j] + drdm[j] * vm_;
    w_(j - 1, 0) = 1.0 / hg + dc_.K * std::cos(2.0 * state_.u[j]) / (r[j] * r[j]);
    for (int o = -2; o <= 2; ++o) {
      int i = j + o;
      double sg = 1.0;
      if (i < 0) i = -i, sg = parity;
      if (i == 0 || i == M - 1) continue;
      w_(j - 1, i - j) -= sg * (st.drr[o + 2] + coef * st.dr[o + 2]);
    }
  }
  w_.factor();
  // d f / d logR by a one-sided difference
  std::vector<double> y(n + 1), f0, f1;
  for (int j = 1; j <= n; ++j) y[j - 1] = state_.u[j];
  y[n] = state_.logR;
  rhs(y, f0);
  const double dm = 1e-7;
  y[n] += dm;
  rhs(y, f1);
  jum_.assign(n, 0.0);
  for (int i = 0; i < n; ++i) jum_[i] = (f1[i] - f0[i]) / dm;
}

void MeshSolver::solve(std::vector<double>& b) const {
  const int n = cfg_.M - 2;
  const double xm = hg_ * b[n];
  std::vector<double> d(b.begin(), b.begin() + n);
  for (int i = 0; i < n; ++i) d[i] += jum_[i] * xm;
  w_.solve(d);
  std::copy(d.begin(), d.end(), b.begin());
  b[n] = xm;
}

void MeshSolver::step() {
  const int M = cfg_.M, n = M - 2;
  std::vector<double> y(n + 1), ynew, err;
  for (int j = 1; j <= n; ++j) y[j - 1] = state_.u[j];
  y[n] = state_.logR;
  const double target = targetLogR();
  const double shift = std::clamp(target - state_.logR, -cfg_.meshMaxShift, cfg_.meshMaxShift);
  const double lag = cfg_.meshRelax * std::exp(2.0 * std::min(target, state_.logR));
  const double minDx = state_.r[1];  // smallest spacing sits at the origin
  bool retry = false;

  for (int attempt = 0; attempt < 60; ++attempt) {
    if (dt_ < 1e-10 * minDx * minDx || state_.t + dt_ == state_.t) {
      std::ostringstream os;
      os << "dt=" << dt_ << " at t=" << static_cast<double>(state_.t) << " (min dx " << minDx << ")";
      throw Error(ErrorKind::StepSizeUnderflow, os.str());
    }
    vm_ = shift / std::max(lag, dt_);
    ros3Step(*this, y, dt_, ynew, err);

    double en = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sc = cfg_.atol + cfg_.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      en += (err[i] / sc) * (err[i] / sc);
    }
    en = std::sqrt(en / n);
    if (!std::isfinite(en)) en = 1e10;

    if (en <= 1.0) {
      auto r = meshNodes(ynew[n], cfg_.L, M);
      for (int j = 0; j + 1 < M; ++j)
        if (!(r[j + 1] > r[j])) throw Error(ErrorKind::MeshTangling, "mesh lost monotonicity");
      state_.t += dt_;
      state_.logR = ynew[n];
      state_.r = std::move(r);
      for (int j = 1; j <= n; ++j) state_.u[j] = ynew[j - 1];
      double fac = en > 0.0 ? 0.9 * std::pow(en, -1.0 / 3.0) : 6.0;
      fac = std::clamp(fac, 0.2, retry ? 1.0 : 6.0);
      dt_ *= fac;
      return;
    }
    ++rejected_;
    retry = true;
    dt_ *= std::clamp(0.9 * std::pow(en, -1.0 / 3.0), 0.1, 0.5);
  }
  throw Error(ErrorKind::StepSizeUnderflow, "too many rejected attempts");
}

RunTrace run(const SimConfig& cfg, const StepObserver& onStep) {
  MeshSolver solver(cfg);
  RunTrace tr;
  auto gradThresholds = cfg.snapshotGradients;
  std::sort(gradThresholds.begin(), gradThresholds.end());
  auto times = cfg.snapshotTimes;
  std::sort(times.begin(), times.end());
  std::size_t nextGrad = 0, nextTime = 0;

  auto record = [&](const Observables& o) {
    const auto& s = solver.state();
    tr.t.push_back(s.t);
    tr.drU0.push_back(o.drU0);
    tr.supGrad.push_back(o.supGrad);
    tr.energy.push_back(o.energy);
    tr.minDx.push_back(o.minDx);
    tr.meshScale.push_back(std::exp(s.logR));
  };
  auto snap = [&](const Observables& o, const std::string& why) {
    const auto& s = solver.state();
    tr.snapshots.push_back({s.t, why, o.drU0, o.supGrad, o.supLocation, s.r, s.u});
  };

  auto o = observe(cfg, solver.state());
  const double E0 = std::max(std::abs(o.energy), 1e-300);
  tr.minLayerNodes = o.layerNodes;
  record(o);
  snap(o, "initial");
  while (nextGrad < gradThresholds.size() && o.supGrad >= gradThresholds[nextGrad]) ++nextGrad;

  while (true) {
    if (o.supGrad >= cfg.maxGradient) {
      tr.reachedStop = true;
      tr.status = "Blowup";
      break;
    }
    if (solver.state().t >= cfg.tMax || tr.steps >= cfg.maxSteps) {
      tr.status = "NoBlowup";
      break;
    }
    solver.step();
    ++tr.steps;
    const double Eprev = o.energy;
    o = observe(cfg, solver.state());
    tr.maxEnergyIncrease = std::max(tr.maxEnergyIncrease, (o.energy - Eprev) / E0);
    tr.minLayerNodes = std::min(tr.minLayerNodes, o.layerNodes);
    record(o);
    if (onStep) onStep(solver.state(), o);

    while (nextGrad < gradThresholds.size() && o.supGrad >= gradThresholds[nextGrad]) {
      std::ostringstream os;
      os << "grad>=" << gradThresholds[nextGrad];
      snap(o, os.str());
      ++nextGrad;
    }
    while (nextTime < times.size() && solver.state().t >= times[nextTime]) {
      snap(o, "t>=" + std::to_string(times[nextTime]));
      ++nextTime;
    }
  }
  tr.rejected = solver.rejected();
  snap(o, "final");
  return tr;
}

SelfSimilarSnapshot toSelfSimilar(const Snapshot& snap, long double T) {
  const long double tau = T - snap.t;
  if (!(tau > 0)) throw Error(ErrorKind::InvalidArgument, "snapshot time must precede T");
  SelfSimilarSnapshot out;
  out.s = -static_cast<double>(std::log(tau));
  const double sq = static_cast<double>(std::sqrt(tau));
  out.y.reserve(snap.r.size());
  for (double r : snap.r) out.y.push_back(r / sq);
  out.f = snap.u;
  return out;
}

std::function<double(double)> snapshotInterpolant(const SelfSimilarSnapshot& s) {
  auto x = s.y;
  auto y = s.f;
  const double x0 = x.front(), x1 = x.back(), y1 = y.back();
  auto p = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(x), std::move(y));
  return [p, x0, x1, y1](double q) {
    if (q <= x0) return 0.0;
    if (q >= x1) return y1;
    return (*p)(q);
  };
}

}  // namespace blowup
