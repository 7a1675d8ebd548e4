#include "blowup/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "blowup/error.hpp"

namespace blowup {

double laguerre(int n, double alpha, double z) {
  if (n == 0) return 1.0;
  double p0 = 1.0, p1 = 1.0 + alpha - z;
  for (int j = 1; j < n; ++j) {
    const double p2 = ((2.0 * j + 1.0 + alpha - z) * p1 - (j + alpha) * p0) / (j + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

std::vector<double> laguerreAll(int n, double alpha, double z) {
  std::vector<double> L(n + 1);
  L[0] = 1.0;
  if (n >= 1) L[1] = 1.0 + alpha - z;
  for (int j = 1; j < n; ++j)
    L[j + 1] = ((2.0 * j + 1.0 + alpha - z) * L[j] - (j + alpha) * L[j - 1]) / (j + 1.0);
  return L;
}

namespace {

// L_n and L_{n-1} with a running log scale so large z does not overflow.
struct ScaledPair {
  double pn, pn1, logScale;
};

ScaledPair scaledLaguerre(int n, double alpha, double z) {
  double p0 = 1.0, p1 = 1.0 + alpha - z, ls = 0.0;
  for (int j = 1; j < n; ++j) {
    const double p2 = ((2.0 * j + 1.0 + alpha - z) * p1 - (j + alpha) * p0) / (j + 1.0);
    p0 = p1;
    p1 = p2;
    const double m = std::abs(p1);
    if (m > 1e150) {
      p0 /= m;
      p1 /= m;
      ls += std::log(m);
    }
  }
  return {p1, p0, ls};
}

GaussLaguerreRule build(int n, double alpha) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "Gauss rule needs n >= 1");
  if (alpha <= -1.0) throw Error(ErrorKind::DivergentIntegrand, "Laguerre weight needs alpha > -1");

  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  for (int i = 0; i < n; ++i) diag[i] = 2.0 * i + 1.0 + alpha;
  for (int i = 0; i + 1 < n; ++i) sub[i] = std::sqrt((i + 1.0) * (i + 1.0 + alpha));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::EigenvaluesOnly);

  GaussLaguerreRule rule;
  rule.alpha = alpha;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double lgNorm = std::lgamma(n + alpha + 1.0) - std::lgamma(n + 1.0);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()[i];
    double logDeriv = 0.0, deriv = 0.0;
    for (int it = 0; it < 8; ++it) {
      const auto s = scaledLaguerre(n, alpha, x);
      deriv = (n * s.pn - (n + alpha) * s.pn1) / x;
      const double dx = s.pn / deriv;
      x -= dx;
      logDeriv = s.logScale;
      if (std::abs(dx) <= 1e-16 * std::abs(x)) break;
    }
    const auto s = scaledLaguerre(n, alpha, x);
    deriv = (n * s.pn - (n + alpha) * s.pn1) / x;
    logDeriv = s.logScale + std::log(std::abs(deriv));
    rule.nodes[i] = x;
    const double lw = lgNorm - std::log(x) - 2.0 * logDeriv;
    rule.weights[i] = lw < -740.0 ? 0.0 : std::exp(lw);
  }
  return rule;
}

}  // namespace

double GaussLaguerreRule::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (weights[i] != 0.0) s += weights[i] * f(nodes[i]);
  return s;
}

std::shared_ptr<const GaussLaguerreRule> gaussLaguerre(int n, double alpha) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, std::shared_ptr<const GaussLaguerreRule>> cache;
  const auto key = std::make_pair(n, alpha);
  {
    std::lock_guard<std::mutex> lk(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto rule = std::make_shared<const GaussLaguerreRule>(build(n, alpha));
  std::lock_guard<std::mutex> lk(mu);
  return cache.emplace(key, rule).first->second;
}

}  // namespace blowup
