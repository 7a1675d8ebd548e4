#include "blowup/coupling.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "blowup/error.hpp"

namespace blowup {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double integrateGK(const std::function<double(double)>& f, double a, double b, double panel = 1.0) {
  const int n = std::max(1, static_cast<int>(std::ceil((b - a) / panel)));
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double lo = a + (b - a) * i / n, hi = a + (b - a) * (i + 1) / n;
    s += GK::integrate(f, lo, hi, 12, 1e-14);
  }
  return s;
}

void requireRegime(const DerivedConstants& dc, Regime want, const char* who) {
  if (dc.regime == Regime::Degenerate)
    throw Error(ErrorKind::DegenerateRegime, std::string(who) + ": omega = 2 gamma, both integrals diverge");
  if (dc.regime != want) throw Error(ErrorKind::RegimeMismatch, std::string(who) + " called in regime " + toString(dc.regime));
}

}  // namespace

double sinMinusId(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
  }
  return std::sin(x) - x;
}

double gFunction(const ProfileSolution& prof, double xi) {
  const double K = prof.dc.K;
  if (xi <= 0.0) return 0.5 * K * std::numbers::pi;
  return 0.5 * K * sinMinusId(prof.evalV(std::log(xi)));
}

double innerIntegral(const ProfileSolution& prof, std::optional<double> xCut) {
  const auto& dc = prof.dc;
  requireRegime(dc, Regime::InnerDominated, "innerIntegral");
  const double p = dc.gamma + dc.omega;  // xi^{d-3-gamma} dxi = e^{(g+w)x} dx
  const double xc = xCut.value_or(prof.xSwitch);

  // below xMin: v = -pi + 2e^{kx}, so g = (K/2)(pi - 4 e^{kx}) to the order kept
  const double x0 = prof.xMin, k = dc.k;
  double s = 0.5 * dc.K * (std::numbers::pi * std::exp(p * x0) / p - 4.0 * std::exp((p + k) * x0) / (p + k));

  auto f = [&](double x) { return 0.5 * dc.K * sinMinusId(prof.evalV(x)) * std::exp(p * x); };
  s += integrateGK(f, x0, xc);

  // tail: v = A e^{-g x} + B e^{-(g+w)x}; sin v - v = -v^3/6 + v^5/120
  const double A = -2.0 * prof.h, B = 2.0 * prof.hMinus, g = dc.gamma, w = dc.omega;
  auto term = [&](double c, double mu) { return c * std::exp((p - mu) * xc) / (mu - p); };
  double t = 0.0;
  t += term(-A * A * A / 6.0, 3 * g);
  t += term(-3.0 * A * A * B / 6.0, 3 * g + w);
  t += term(-3.0 * A * B * B / 6.0, 3 * g + 2 * w);
  t += term(-B * B * B / 6.0, 3 * g + 3 * w);
  t += term(std::pow(A, 5) / 120.0, 5 * g);
  t += term(5.0 * std::pow(A, 4) * B / 120.0, 5 * g + w);
  s += 0.5 * dc.K * t;
  return s;
}

double innerConstant(const ProfileSolution& prof, const EigenBasis& b, int n, std::optional<double> xCut) {
  if (n < 0 || n > b.maxN) throw Error(ErrorKind::InvalidArgument, "n outside the basis");
  return b.cOrigin[n] * innerIntegral(prof, xCut);
}

double outerIntegral(const EigenBasis& b, int N, int n, int nodes) {
  requireRegime(b.dc, Regime::OuterDominated, "outerIntegral");
  if (N < 0 || N > b.maxN || n < 0 || n > b.maxN) throw Error(ErrorKind::InvalidArgument, "index outside the basis");
  // phi_N^3 phi_n y^{d-3} e^{-y^2/4} = N_N^3 N_n y^{d-3-4g} L_N^3 L_n e^{-z}
  const double g = b.dc.gamma, d = b.dc.d;
  const double p = d - 3.0 - 4.0 * g;  // small-y power, > -1 in this regime
  const auto rule = gaussLaguerre(nodes, 0.5 * (p - 1.0));
  double s = 0.0;
  for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
    if (rule->weights[i] == 0.0) continue;
    const double z = rule->nodes[i];
    const double LN = laguerre(N, b.alpha, z), Ln = laguerre(n, b.alpha, z);
    s += rule->weights[i] * LN * LN * LN * Ln;
  }
  // y = 2 sqrt z: y^p dy = 2^p z^{(p-1)/2} dz
  return std::pow(b.norm[N], 3) * b.norm[n] * std::exp2(p) * s;
}

double outerConstant(const ProfileSolution& prof, const EigenBasis& b, int N, int n, int nodes) {
  const double cN = b.cOrigin[N];
  return 2.0 * b.dc.K * std::pow(prof.h, 3) / (3.0 * cN * cN * cN) * outerIntegral(b, N, n, nodes);
}

CouplingConstants couplingConstants(const ProfileSolution& prof, const EigenBasis& b, int N, int maxN) {
  const auto& dc = b.dc;
  if (dc.regime == Regime::Degenerate)
    throw Error(ErrorKind::DegenerateRegime, "omega = 2 gamma: both coupling integrals diverge logarithmically");
  if (maxN > b.maxN || N > b.maxN || N < 0) throw Error(ErrorKind::InvalidArgument, "basis too small for N/maxN");

  CouplingConstants cc;
  cc.params = b.params;
  cc.dc = dc;
  cc.regime = dc.regime;
  cc.N = N;
  cc.delta = dc.delta;
  cc.diagnostics.crossoverScaleK = std::sqrt(1e-2);
  if (dc.regime == Regime::InnerDominated) {
    const double I = innerIntegral(prof);
    cc.diagnostics.innerIntegralValue = I;
    cc.diagnostics.outerIntegralValue = kNaN;
    for (int n = 0; n <= maxN; ++n) cc.D.push_back(b.cOrigin[n] * I);
  } else {
    cc.diagnostics.innerIntegralValue = kNaN;
    cc.diagnostics.outerIntegralValue = outerIntegral(b, N, N);
    for (int n = 0; n <= maxN; ++n) cc.D.push_back(outerConstant(prof, b, N, n));
  }
  if (!(cc.D[N] > 0.0)) throw Error(ErrorKind::InvalidArgument, "D_N is not positive");
  return cc;
}

TruncatedIntegrals truncatedIntegrals(const ProfileSolution& prof, const EigenBasis& b, int N, int n, double eps,
                                      std::optional<double> Kopt) {
  const auto& dc = b.dc;
  if (dc.regime == Regime::Degenerate) throw Error(ErrorKind::DegenerateRegime, "omega = 2 gamma");
  TruncatedIntegrals r;
  r.eps = eps;
  r.K = Kopt.value_or(std::sqrt(eps));
  const double d = dc.d, cN = b.cOrigin[N];

  // inner: y = eps e^x, F(psi) y^{d-1} dy = g(e^x) y^{d-2} dx
  auto fin = [&](double x) {
    const double y = eps * std::exp(x);
    return 0.5 * dc.K * sinMinusId(prof.evalV(x)) * b.phi(n, y) * std::exp((d - 2.0) * std::log(y) - 0.25 * y * y);
  };
  r.inner = integrateGK(fin, prof.xMin - 20.0 / dc.k, std::log(r.K / eps));

  // outer: y = e^t, psi = -(h/cN) eps^g phi_N
  const double amp = prof.h / cN * std::pow(eps, dc.gamma);
  auto fout = [&](double t) {
    const double y = std::exp(t);
    const double psi = -amp * b.phi(N, y);
    const double F = 0.5 * dc.K * sinMinusId(2.0 * psi);
    return F * b.phi(n, y) * std::exp((d - 2.0) * t - 0.25 * y * y);
  };
  r.outer = integrateGK(fout, std::log(r.K), std::log(60.0), 0.5);

  r.subdominantRatio = dc.regime == Regime::InnerDominated ? r.outer / r.inner : r.inner / r.outer;
  return r;
}

}  // namespace blowup
