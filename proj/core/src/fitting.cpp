#include "blowup/fitting.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>

#include "blowup/error.hpp"

namespace blowup {

const char* toString(FitKind k) { return k == FitKind::PowerFit ? "PowerFit" : "LogFit"; }

namespace {

struct Line {
  double a = 0, b = 0;  // y = a + b x
  double seB = 0;
  double ssRes = 0, ssTot = 0;
  int n = 0;
};

Line weightedLine(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i], sx += w[i] * x[i], sy += w[i] * y[i];
    sxx += w[i] * x[i] * x[i], sxy += w[i] * x[i] * y[i];
  }
  Line L;
  L.n = static_cast<int>(x.size());
  const double det = sw * sxx - sx * sx;
  L.b = (sw * sxy - sx * sy) / det;
  L.a = (sy - L.b * sx) / sw;
  const double ym = sy / sw;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - L.a - L.b * x[i];
    L.ssRes += w[i] * r * r;
    L.ssTot += w[i] * (y[i] - ym) * (y[i] - ym);
  }
  if (L.n > 2) L.seB = std::sqrt(L.ssRes / (L.n - 2) * sw / det);
  return L;
}

// time to go from the last sample, in double with full relative precision
std::vector<double> timeToLast(const std::vector<long double>& t) {
  std::vector<double> tau(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) tau[i] = static_cast<double>(t.back() - t[i]);
  return tau;
}

void checkInput(const std::vector<long double>& t, const std::vector<double>& G, int minPoints) {
  if (t.size() != G.size()) throw Error(ErrorKind::InvalidArgument, "t and G lengths differ");
  if (static_cast<int>(t.size()) < minPoints + 2) throw Error(ErrorKind::WindowTooShort, "trace has too few samples");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw Error(ErrorKind::InvalidArgument, "trace times must increase strictly");
  for (double g : G)
    if (!(g > 0.0)) throw Error(ErrorKind::InvalidArgument, "observable must be positive");
}

}  // namespace

FitResult fitPower(const std::vector<long double>& t, const std::vector<double>& G, const PowerFitOptions& o) {
  checkInput(t, G, o.minPoints);
  const auto tau = timeToLast(t);
  const std::size_t n = t.size();

  // q = d log G / dt on interior samples by the nonuniform three-point rule
  std::vector<double> qt, qq;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hm = tau[i - 1] - tau[i], hp = tau[i] - tau[i + 1];
    const double gm = std::log(G[i - 1]), g0 = std::log(G[i]), gp = std::log(G[i + 1]);
    const double q = -hp / (hm * (hm + hp)) * gm + (hp - hm) / (hm * hp) * g0 + hm / (hp * (hm + hp)) * gp;
    if (q > 0.0) {
      qt.push_back(tau[i]);
      qq.push_back(q);
    }
  }
  if (static_cast<int>(qt.size()) < o.minPoints) throw Error(ErrorKind::WindowTooShort, "too few growing samples");

  const double span = std::pow(10.0, o.decades);
  auto fitWindow = [&](double Delta, double lo, double hi, Line& L, int& m) {
    std::vector<double> x, y, w;
    for (std::size_t i = 0; i < qt.size(); ++i) {
      const double ttg = Delta + qt[i];
      if (ttg < lo || ttg > hi) continue;
      x.push_back(qt[i]);
      y.push_back(1.0 / qq[i]);
      w.push_back(1.0 / (ttg * ttg));
    }
    m = static_cast<int>(x.size());
    if (m < o.minPoints) return false;
    L = weightedLine(x, y, w);
    return true;
  };

  // 1/q = (Delta + tau)/p; iterate Delta and the window it defines
  double Delta = qt.back() > 0.0 ? qt.back() : qt[qt.size() - 2];
  Line L;
  int m = 0;
  for (int it = 0; it < 50; ++it) {
    const double end = Delta + qt.back();
    if (!fitWindow(Delta, end, span * end, L, m)) throw Error(ErrorKind::WindowTooShort, "power-fit window too sparse");
    if (!(L.b > 0.0)) throw Error(ErrorKind::DegenerateFit, "non-positive exponent in power fit");
    const double next = std::max(L.a / L.b, 0.0);
    if (std::abs(next - Delta) <= 1e-10 * std::max(next, 1e-300)) {
      Delta = next;
      break;
    }
    Delta = next;
  }
  const double end = Delta + qt.back();
  if (Delta + qt.front() < span * end)
    throw Error(ErrorKind::WindowTooShort, "trace does not span the requested decades of T-t");
  fitWindow(Delta, end, span * end, L, m);

  FitResult r;
  r.kind = FitKind::PowerFit;
  r.exponent = 1.0 / L.b;
  r.beta = r.exponent - 0.5;
  r.deltaT = Delta;
  r.T = t.back() + static_cast<long double>(Delta);
  r.nPoints = m;
  r.windowStart = r.T - static_cast<long double>(span * end);
  r.windowEnd = r.T - static_cast<long double>(end);
  r.r2 = L.ssTot > 0.0 ? 1.0 - L.ssRes / L.ssTot : 1.0;
  double rr = 0.0;
  for (std::size_t i = 0; i < qt.size(); ++i) {
    const double ttg = Delta + qt[i];
    if (ttg < end || ttg > span * end) continue;
    const double rel = (1.0 / qq[i] - L.a - L.b * qt[i]) * qq[i];
    rr += rel * rel;
  }
  r.residual = std::sqrt(rr / std::max(m, 1));

  // statistical error and the spread between the two halves of the window
  const double stat = L.seB / (L.b * L.b);
  const double mid = std::sqrt(span) * end;
  Line L1, L2;
  int m1 = 0, m2 = 0;
  double sys = 0.0;
  if (fitWindow(Delta, end, mid, L1, m1) && fitWindow(Delta, mid, span * end, L2, m2))
    sys = 0.5 * std::abs(1.0 / L1.b - 1.0 / L2.b);
  r.uncertainty = std::max(stat, sys);
  return r;
}

FitResult fitLog(const std::vector<long double>& t, const std::vector<double>& G, const LogFitOptions& o) {
  checkInput(t, G, o.minPoints);
  if (!(o.delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  const auto tau = timeToLast(t);
  const std::size_t n = t.size();

  // first guess from q ~ 1/(2(T-t)), using the last interior sample
  const double hm = tau[n - 3] - tau[n - 2], hp = tau[n - 2] - tau[n - 1];
  const double q = (std::log(G[n - 1]) - std::log(G[n - 3])) / (hm + hp);
  double Delta = q > 0.0 ? std::max(0.5 / q - tau[n - 2], hp) : hp;

  std::vector<std::size_t> win;
  auto window = [&](double D) {
    win.clear();
    const double xEnd = -std::log(D + tau[n - 1]);
    for (std::size_t i = 0; i < n; ++i)
      if (-std::log(D + tau[i]) >= xEnd - o.efolds) win.push_back(i);
    // one sample at or past the boundary so the window covers the full span
    if (!win.empty() && win.front() > 0) win.insert(win.begin(), win.front() - 1);
  };
  auto lineFor = [&](double D) {
    std::vector<double> x, y, w;
    for (auto i : win) {
      const double ttg = D + tau[i];
      x.push_back(-std::log(ttg));
      y.push_back(std::pow(std::sqrt(ttg) * G[i], o.delta));
      w.push_back(1.0);
    }
    return weightedLine(x, y, w);
  };
  auto objective = [&](double logD) {
    const auto L = lineFor(std::exp(logD));
    return L.ssRes;
  };

  double bestLog = std::log(Delta);
  for (int outer = 0; outer < 8; ++outer) {
    window(std::exp(bestLog));
    if (static_cast<int>(win.size()) < o.minPoints) throw Error(ErrorKind::WindowTooShort, "log-fit window too sparse");
    const double lo = bestLog - std::log(1e4), hi = bestLog + std::log(1e4);
    const int scan = 161;
    double bv = std::numeric_limits<double>::infinity();
    int bi = 0;
    for (int i = 0; i < scan; ++i) {
      const double v = objective(lo + (hi - lo) * i / (scan - 1));
      if (v < bv) bv = v, bi = i;
    }
    if (bi == 0 || bi == scan - 1) throw Error(ErrorKind::DegenerateFit, "blow-up time estimate ran to the search boundary");
    const double step = (hi - lo) / (scan - 1);
    const auto res = boost::math::tools::brent_find_minima(objective, lo + (bi - 1) * step, lo + (bi + 1) * step, 40);
    const bool stable = std::abs(res.first - bestLog) < 1e-6;
    bestLog = res.first;
    if (stable) break;
  }
  Delta = std::exp(bestLog);
  window(Delta);
  if (static_cast<int>(win.size()) < o.minPoints) throw Error(ErrorKind::WindowTooShort, "log-fit window too sparse");
  const double xEnd = -std::log(Delta + tau[n - 1]);
  if (-std::log(Delta + tau[0]) > xEnd - o.efolds)
    throw Error(ErrorKind::WindowTooShort, "trace does not span the requested e-foldings");
  const auto L = lineFor(Delta);
  if (!(L.b > 0.0)) throw Error(ErrorKind::DegenerateFit, "non-positive slope in log fit");

  FitResult r;
  r.kind = FitKind::LogFit;
  r.delta = o.delta;
  r.deltaT = Delta;
  r.T = t.back() + static_cast<long double>(Delta);
  r.C = std::pow(L.b, 1.0 / o.delta);
  r.s0 = -L.a / L.b;
  r.r2 = L.ssTot > 0.0 ? 1.0 - L.ssRes / L.ssTot : 1.0;
  r.nPoints = static_cast<int>(win.size());
  r.windowStart = t[win.front()];
  r.windowEnd = t[win.back()];
  double rr = 0.0;
  for (auto i : win) {
    const double ttg = Delta + tau[i], x = -std::log(ttg);
    const double model = r.C * std::pow(x - r.s0, 1.0 / o.delta);
    const double rel = std::sqrt(ttg) * G[i] / model - 1.0;
    rr += rel * rel;
  }
  r.residual = std::sqrt(rr / win.size());
  // slope error propagated to C
  r.uncertainty = L.seB / (o.delta * L.b) * r.C;
  return r;
}

}  // namespace blowup
