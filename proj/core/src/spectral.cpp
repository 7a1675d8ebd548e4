#include "blowup/spectral.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <ostream>

#include "blowup/error.hpp"

namespace blowup {

namespace {

constexpr int kBaseNodes = 200;
constexpr int kMaxNodes = 800;

struct GaussSum {
  double value, magnitude;
};

GaussSum gaussInner(double d, const RadialFn& f, const RadialFn& g, double p, int nodes) {
  const auto rule = gaussLaguerre(nodes, 0.5 * (d - 2.0 + p));
  double s = 0.0, m = 0.0;
  for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
    if (rule->weights[i] == 0.0) continue;
    const double y = 2.0 * std::sqrt(rule->nodes[i]);
    const double t = rule->weights[i] * f(y) * g(y) * std::pow(y, -p);
    s += t;
    m += std::abs(t);
  }
  const double pref = std::exp2(d - 1.0 + p);
  return {pref * s, pref * m};
}

double adaptiveInner(double d, const RadialFn& f, const RadialFn& g) {
  auto integrand = [&](double y) {
    if (y <= 0.0) return 0.0;
    const double r = f(y) * g(y) * std::exp((d - 1.0) * std::log(y) - 0.25 * y * y);
    return std::isfinite(r) ? r : 0.0;
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const double yc = 2.0 * std::sqrt(std::max(1.0, 0.5 * d));
  return ts.integrate(integrand, 0.0, yc, 1e-13) + es.integrate(integrand, yc, INFINITY, 1e-13);
}

}  // namespace

double laguerreAtZero(int n, double alpha) {
  return std::exp(std::lgamma(n + 1.0 + alpha) - std::lgamma(n + 1.0) - std::lgamma(1.0 + alpha));
}

double EigenBasis::phi(int n, double y) const {
  return norm[n] * std::pow(y, -dc.gamma) * laguerre(n, alpha, 0.25 * y * y);
}

std::vector<double> EigenBasis::phiAll(double y) const {
  auto L = laguerreAll(maxN, alpha, 0.25 * y * y);
  const double yg = std::pow(y, -dc.gamma);
  for (int n = 0; n <= maxN; ++n) L[n] *= norm[n] * yg;
  return L;
}

double innerProduct(double d, const RadialFn& f, const RadialFn& g, double p) {
  if (p + d - 1.0 <= -1.0) throw Error(ErrorKind::DivergentIntegrand, "f*g*y^{d-1} not integrable at y=0");
  const auto a = gaussInner(d, f, g, p, kBaseNodes);
  const auto b = gaussInner(d, f, g, p, 2 * kBaseNodes);
  if (std::abs(a.value - b.value) <= 1e-11 * std::max(b.magnitude, 1e-300)) return b.value;
  return adaptiveInner(d, f, g);
}

double innerProduct(const EigenBasis& b, const RadialFn& f, const RadialFn& g, double p) {
  return innerProduct(b.dc.d, f, g, p);
}

std::vector<std::vector<double>> gramMatrix(const EigenBasis& b) {
  const int M = b.maxN + 1;
  std::vector<std::vector<double>> G(M, std::vector<double>(M, 0.0));
  const double pref = std::exp2(1.0 + b.dc.omega);  // 2^{d-1-2 gamma}
  for (std::size_t i = 0; i < b.rule->nodes.size(); ++i) {
    const double w = b.rule->weights[i];
    if (w == 0.0) continue;
    const auto L = laguerreAll(b.maxN, b.alpha, b.rule->nodes[i]);
    for (int n = 0; n < M; ++n)
      for (int m = 0; m <= n; ++m) G[n][m] += w * L[n] * L[m];
  }
  for (int n = 0; n < M; ++n)
    for (int m = 0; m <= n; ++m) {
      G[n][m] *= pref * b.norm[n] * b.norm[m];
      G[m][n] = G[n][m];
    }
  return G;
}

EigenBasis buildBasis(const ModelParams& p, int maxN) {
  if (maxN < 0) throw Error(ErrorKind::InvalidArgument, "maxN must be non-negative");
  EigenBasis b;
  b.params = p;
  b.dc = derive(p);
  b.maxN = maxN;
  b.alpha = 0.5 * b.dc.omega;
  for (int n = 0; n <= maxN; ++n) {
    b.normClosed.push_back(std::exp2(-1.0 - b.alpha) *
                           std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(n + 1.0 + b.alpha))));
    b.lambda.push_back(eigenvalue(b.dc, n).lambda);
  }

  for (int nodes = kBaseNodes; nodes <= kMaxNodes; nodes *= 2) {
    b.rule = gaussLaguerre(nodes, b.alpha);
    b.norm = b.normClosed;
    auto G = gramMatrix(b);
    for (int n = 0; n <= maxN; ++n) b.norm[n] /= std::sqrt(G[n][n]);
    G = gramMatrix(b);
    b.orthoResidual = 0.0;
    for (int n = 0; n <= maxN; ++n)
      for (int m = 0; m <= maxN; ++m)
        b.orthoResidual = std::max(b.orthoResidual, std::abs(G[n][m] - (n == m ? 1.0 : 0.0)));
    if (b.orthoResidual <= 1e-10) break;
  }
  if (b.orthoResidual > 1e-8)
    throw Error(ErrorKind::QuadratureNotConverged, "orthonormality residual " + std::to_string(b.orthoResidual));

  for (int n = 0; n <= maxN; ++n) b.cOrigin.push_back(b.norm[n] * laguerreAtZero(n, b.alpha));
  return b;
}

double defaultProjectionRange(const EigenBasis& b) {
  return 2.0 * std::sqrt(4.0 * (b.maxN + b.alpha + b.dc.d) + 80.0);
}

std::vector<double> project(const RadialFn& psi, const EigenBasis& b, double yMax) {
  if (yMax <= 0.0) yMax = defaultProjectionRange(b);
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();

  // geometric panels near 0 for the non-integer power, then panels of width <= 0.25
  std::vector<double> edges{0.0};
  const double first = std::min(0.25, yMax);
  for (int j = 24; j >= 0; --j) edges.push_back(first * std::pow(0.5, j));
  const int nUniform = static_cast<int>(std::ceil((yMax - first) / 0.25));
  for (int j = 1; j <= nUniform; ++j) edges.push_back(first + (yMax - first) * j / nUniform);

  std::vector<double> a(b.maxN + 1, 0.0);
  auto addPoint = [&](double y, double w) {
    const double r = w * psi(y) * std::exp((b.dc.d - 1.0) * std::log(y) - 0.25 * y * y);
    if (r == 0.0) return;
    const auto ph = b.phiAll(y);
    for (int n = 0; n <= b.maxN; ++n) a[n] += r * ph[n];
  };
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double lo = edges[e], hi = edges[e + 1];
    if (hi <= lo) continue;
    const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      addPoint(c + hw * xs[i], hw * ws[i]);
      if (xs[i] != 0.0) addPoint(c - hw * xs[i], hw * ws[i]);
    }
  }
  return a;
}

void writeBasisCsv(const EigenBasis& b, std::ostream& os, double yMin, double yMax, int points) {
  os.precision(12);
  os << "y";
  for (int n = 0; n <= b.maxN; ++n) os << ",phi" << n;
  os << '\n';
  for (int i = 0; i < points; ++i) {
    const double y = yMin + (yMax - yMin) * i / std::max(points - 1, 1);
    os << y;
    for (double v : b.phiAll(y)) os << ',' << v;
    os << '\n';
  }
}

}  // namespace blowup
