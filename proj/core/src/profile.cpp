#include "blowup/profile.hpp"

#include <algorithm>
#include <array>
#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>

#include "blowup/error.hpp"

namespace blowup {

namespace odeint = boost::numeric::odeint;
using boost::math::interpolators::cardinal_cubic_hermite;
constexpr double kPi = std::numbers::pi;

class ProfileInterp {
 public:
  ProfileInterp(std::vector<double> v, std::vector<double> dv, std::vector<double> vp,
                std::vector<double> vpp, double x0, double dx)
      : x0_(x0), x1_(x0 + (v.size() - 1) * dx),
        v_(std::move(v), std::move(dv), x0, dx),
        vp_(std::move(vp), std::move(vpp), x0, dx) {}

  double v(double x) const { return v_(std::clamp(x, x0_, x1_)); }
  double vp(double x) const { return vp_(std::clamp(x, x0_, x1_)); }

 private:
  double x0_, x1_;
  cardinal_cubic_hermite<std::vector<double>> v_, vp_;
};

namespace {

using State = std::array<double, 2>;

double seriesCoeff(const DerivedConstants& dc) {
  return -2.0 * (dc.d + dc.k - 2.0) / (3.0 * (dc.d + 4.0 * dc.k - 2.0));
}

// Fritsch-Carlson: keeps the Hermite cubic monotone on every interval.
std::vector<double> limitSlopes(const std::vector<double>& y, std::vector<double> m, double dx) {
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    const double delta = (y[i + 1] - y[i]) / dx;
    if (delta <= 0.0) {
      m[i] = m[i + 1] = 0.0;
      continue;
    }
    const double a = m[i] / delta, b = m[i + 1] / delta;
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double tau = 3.0 / std::sqrt(r);
      m[i] = tau * a * delta;
      m[i + 1] = tau * b * delta;
    }
  }
  return m;
}

std::pair<double, double> slopeSup(const ProfileSolution& sol);

}  // namespace

double ProfileSolution::evalV(double x) const {
  if (x < xMin) {
    const double a = seriesCoeff(dc);
    return -kPi + 2.0 * std::exp(dc.k * x) + a * std::exp(3.0 * dc.k * x);
  }
  if (x > xSwitch)
    return -2.0 * h * std::exp(-dc.gamma * x) + 2.0 * hMinus * std::exp(-(dc.gamma + dc.omega) * x);
  return interp->v(x);
}

double ProfileSolution::evalVPrime(double x) const {
  if (x < xMin) {
    const double a = seriesCoeff(dc);
    return 2.0 * dc.k * std::exp(dc.k * x) + 3.0 * dc.k * a * std::exp(3.0 * dc.k * x);
  }
  if (x > xSwitch)
    return 2.0 * dc.gamma * h * std::exp(-dc.gamma * x) -
           2.0 * (dc.gamma + dc.omega) * hMinus * std::exp(-(dc.gamma + dc.omega) * x);
  return interp->vp(x);
}

ProfileSolution solveProfile(const ModelParams& p, const ProfileOptions& opts) {
  ProfileSolution sol;
  sol.params = p;
  sol.dc = derive(p);
  const auto& dc = sol.dc;
  if (!(opts.tolerance > 0.0 && opts.tolerance < 1e-3))
    throw Error(ErrorKind::InvalidArgument, "profile tolerance must be in (0, 1e-3)");

  sol.tolerance = opts.tolerance;
  sol.xMin = opts.xMin.value_or(-12.0 / dc.k);
  sol.xMax = opts.xMax.value_or(std::max(23.0 / dc.omega, 19.7 / dc.gamma));
  if (sol.xMax <= 0.0 || sol.xMin >= 0.0)
    throw Error(ErrorKind::InvalidArgument, "profile range must straddle x=0");
  if (std::exp(4.0 * dc.k * sol.xMin) > opts.tolerance)
    throw Error(ErrorKind::InvalidArgument, "xMin too large for the start series at this tolerance");

  const double step = opts.step.value_or(0.004 / dc.k);
  const auto n = static_cast<std::size_t>(std::ceil((sol.xMax - sol.xMin) / step));
  sol.dx = (sol.xMax - sol.xMin) / n;
  sol.xMax = sol.xMin + n * sol.dx;

  const double K = dc.K, dm2 = dc.d - 2.0;
  auto rhs = [K, dm2](const State& y, State& dy, double) {
    dy[0] = y[1];
    dy[1] = -dm2 * y[1] - K * std::sin(y[0]);
  };

  const double a = seriesCoeff(dc);
  const double e1 = std::exp(dc.k * sol.xMin), e3 = e1 * e1 * e1;
  State y{-kPi + 2.0 * e1 + a * e3, 2.0 * dc.k * e1 + 3.0 * dc.k * a * e3};

  sol.grid.reserve(n + 1);
  sol.v.reserve(n + 1);
  sol.vPrime.reserve(n + 1);
  // pure relative control: the tail decays to ~1e-20 and must keep its digits
  auto stepper = odeint::make_dense_output(1e-300, opts.tolerance, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_n_steps(stepper, rhs, y, sol.xMin, sol.dx, n, [&](const State& s, double x) {
    sol.grid.push_back(x);
    sol.v.push_back(s[0]);
    sol.vPrime.push_back(s[1]);
  });

  for (std::size_t i = 0; i < sol.v.size(); ++i) {
    if (!(sol.v[i] > -kPi && sol.v[i] < 0.0 && sol.vPrime[i] > 0.0))
      throw Error(ErrorKind::TrappingViolation, "orbit left the strip -pi < v < 0 or lost monotonicity");
  }

  std::vector<double> vpp(sol.v.size());
  for (std::size_t i = 0; i < vpp.size(); ++i) vpp[i] = -dm2 * sol.vPrime[i] - K * std::sin(sol.v[i]);
  sol.interp = std::make_shared<const ProfileInterp>(sol.v, limitSlopes(sol.v, sol.vPrime, sol.dx), sol.vPrime,
                                                     vpp, sol.xMin, sol.dx);

  const auto tail = extractTail(sol);
  sol.h = tail.h;
  sol.hMinus = tail.hMinus;
  sol.fitResidual = tail.fitResidual;
  sol.xSwitch = tail.windowStart;

  const auto trap = checkTrapping(sol, 8);
  const double allowed = 1e4 * opts.tolerance;
  if (trap.maxRelLowerViolation > allowed || trap.maxRelUpperViolation > allowed)
    throw Error(ErrorKind::TrappingViolation, "orbit left the trapping region beyond tolerance");

  const auto [sup, arg] = slopeSup(sol);
  sol.Cs = 1.0 / sup;
  sol.slopeArgmax = arg;
  return sol;
}

TailFit extractTail(const ProfileSolution& sol) {
  const auto& dc = sol.dc;
  TailFit out;
  out.windowStart = 0.7 * sol.xMax;
  out.windowEnd = sol.xMax;
  if (dc.omega * (out.windowEnd - out.windowStart) < 1e-3)
    throw Error(ErrorKind::TailFitIllConditioned, "tail window too narrow to separate the two exponentials");

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < sol.grid.size(); ++i)
    if (sol.grid[i] >= out.windowStart) idx.push_back(i);
  if (idx.size() < 8) throw Error(ErrorKind::TailFitIllConditioned, "too few samples in the tail window");

  // v e^{g x} = 2h+ + 2h- e^{-w x}; the second column is rescaled to O(1)
  const double x0 = out.windowStart;
  Eigen::MatrixXd A(idx.size(), 2);
  Eigen::VectorXd b(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const double x = sol.grid[idx[r]];
    A(r, 0) = 1.0;
    A(r, 1) = std::exp(-dc.omega * (x - x0));
    b[r] = sol.v[idx[r]] * std::exp(dc.gamma * x);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s[1] <= 1e-12 * s[0])
    throw Error(ErrorKind::TailFitIllConditioned, "tail exponentials are numerically collinear");
  const Eigen::Vector2d c = svd.solve(b);
  out.h = -0.5 * c[0];
  out.hMinus = 0.5 * c[1] * std::exp(dc.omega * x0);
  out.fitResidual = std::sqrt((A * c - b).squaredNorm() / idx.size()) / std::abs(c[0]);
  if (!(out.h > 0.0)) throw Error(ErrorKind::TailFitIllConditioned, "fitted tail amplitude h is not positive");
  return out;
}

double evalU(const ProfileSolution& sol, double xi) {
  if (xi <= 0.0) return 0.0;
  return 0.5 * (sol.evalV(std::log(xi)) + kPi);
}

double evalDUdxi(const ProfileSolution& sol, double xi) {
  if (xi <= 0.0) return sol.dc.k == 1 ? 1.0 : 0.0;
  return 0.5 * sol.evalVPrime(std::log(xi)) / xi;
}

namespace {

std::pair<double, double> slopeSup(const ProfileSolution& sol) {
  // dU/dxi = v'(x) e^{-x}/2; the xi->0 limit is 1 for k=1 and 0 otherwise
  const double atOrigin = sol.dc.k == 1 ? 1.0 : 0.0;
  std::size_t best = 0;
  double bestVal = -1.0;
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    const double s = 0.5 * sol.vPrime[i] * std::exp(-sol.grid[i]);
    if (s > bestVal) {
      bestVal = s;
      best = i;
    }
  }
  double sup = bestVal, arg = std::exp(sol.grid[best]);
  if (best > 0 && best + 1 < sol.grid.size()) {
    auto neg = [&](double x) { return -0.5 * sol.interp->vp(x) * std::exp(-x); };
    const auto r = boost::math::tools::brent_find_minima(neg, sol.grid[best - 1], sol.grid[best + 1], 52);
    if (-r.second > sup) {
      sup = -r.second;
      arg = std::exp(r.first);
    }
  }
  if (atOrigin >= sup) {
    sup = atOrigin;
    arg = 0.0;
  }
  return {sup, arg};
}

}  // namespace

double slopeNormalization(const ProfileSolution& sol) { return 1.0 / slopeSup(sol).first; }

double lowerBoundaryFlux(const DerivedConstants& dc, double v) {
  const double vp = -dc.k * std::sin(v);
  const double Fv = vp, Fvp = -(dc.d - 2.0) * vp - dc.K * std::sin(v);
  return dc.k * std::cos(v) * Fv + Fvp;  // grad of v' + k sin v
}

double upperBoundaryFlux(const DerivedConstants& dc, double v) {
  const double vp = -dc.gamma * std::sin(v);
  const double Fv = vp, Fvp = -(dc.d - 2.0) * vp - dc.K * std::sin(v);
  return -dc.gamma * std::cos(v) * Fv - Fvp;  // grad of -g sin v - v'
}

TrappingReport checkTrapping(const ProfileSolution& sol, int fluxSamples) {
  const auto& dc = sol.dc;
  TrappingReport rep;
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    const double sv = std::sin(sol.v[i]), vp = sol.vPrime[i];
    const double lo = -dc.k * sv - vp, up = vp + dc.gamma * sv;
    rep.maxLowerViolation = std::max(rep.maxLowerViolation, lo);
    rep.maxUpperViolation = std::max(rep.maxUpperViolation, up);
    rep.maxRelLowerViolation = std::max(rep.maxRelLowerViolation, lo / vp);
    rep.maxRelUpperViolation = std::max(rep.maxRelUpperViolation, up / vp);
  }
  rep.minBoundaryFlux = INFINITY;
  for (int j = 1; j <= fluxSamples; ++j) {
    const double v = -kPi + kPi * j / (fluxSamples + 1.0);
    FluxSample s{v, lowerBoundaryFlux(dc, v), upperBoundaryFlux(dc, v)};
    rep.minBoundaryFlux = std::min({rep.minBoundaryFlux, s.lowerFlux, s.upperFlux});
    rep.boundaryFluxSamples.push_back(s);
  }
  return rep;
}

void writeOrbitCsv(const ProfileSolution& sol, std::ostream& os) {
  os.precision(17);
  os << "x,v,vPrime\n";
  for (std::size_t i = 0; i < sol.grid.size(); ++i)
    os << sol.grid[i] << ',' << sol.v[i] << ',' << sol.vPrime[i] << '\n';
}

}  // namespace blowup
