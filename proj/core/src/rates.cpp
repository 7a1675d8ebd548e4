#include "blowup/rates.hpp"

#include <array>
#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <numbers>

#include "blowup/error.hpp"

namespace blowup {

namespace odeint = boost::numeric::odeint;
using json = nlohmann::json;

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNeutralTol = 1e-12;
}  // namespace

double EpsilonTrajectory::rhs(double e) const {
  const auto& c = constants;
  return (-c.lambdaN * e - c.B() * std::pow(e, 1.0 + c.delta)) / c.gamma;
}

double epsilonContinuation(const EpsilonConstants& c, double s1, double e1, double s) {
  const double w1 = std::pow(e1, -c.delta), B = c.B();
  double w;
  if (std::abs(c.lambdaN) <= kNeutralTol)
    w = w1 + c.delta * B / c.gamma * (s - s1);
  else
    w = (w1 + B / c.lambdaN) * std::exp(c.delta * c.lambdaN * (s - s1) / c.gamma) - B / c.lambdaN;
  return std::pow(w, -1.0 / c.delta);
}

EpsilonTrajectory solveEpsilon(const EpsilonConstants& c, double eps0, double sMax, const EpsilonOptions& opts) {
  if (c.lambdaN < -kNeutralTol)
    throw Error(ErrorKind::NegativeEigenvalue, "lambda_N < 0 is discarded by the construction");
  if (!(eps0 > 0.0 && eps0 <= 0.1)) throw Error(ErrorKind::InvalidArgument, "eps0 must lie in (0, 0.1]");
  if (!(c.gamma > 0.0 && c.delta > 0.0 && c.h > 0.0 && c.cN > 0.0))
    throw Error(ErrorKind::InvalidArgument, "gamma, delta, h and c_N must be positive");
  if (!(sMax > 0.0 && opts.ds > 0.0)) throw Error(ErrorKind::InvalidArgument, "sMax and ds must be positive");

  EpsilonTrajectory tr;
  tr.constants = c;
  tr.eps0 = eps0;
  const auto n = static_cast<std::size_t>(std::ceil(sMax / opts.ds));
  tr.ds = sMax / n;

  // integrate log eps: keeps relative accuracy while eps decays by many decades
  using State = std::array<double, 1>;
  auto f = [&tr](const State& y, State& dy, double) {
    const double e = std::exp(y[0]);
    dy[0] = tr.rhs(e) / e;
  };
  State y{std::log(eps0)};
  auto stepper = odeint::make_dense_output(1e-300, opts.tolerance, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_n_steps(stepper, f, y, 0.0, tr.ds, n, [&](const State& st, double s) {
    tr.s.push_back(s);
    tr.eps.push_back(std::exp(st[0]));
  });

  for (std::size_t i = 1; i < tr.eps.size(); ++i)
    if (!(tr.eps[i] > 0.0) || tr.eps[i] > tr.eps[i - 1] * (1.0 + 1e-12))
      throw Error(ErrorKind::BlowupOfEpsilon, "eps(s) grew; check the signs of the constants");

  if (std::abs(c.lambdaN) <= kNeutralTol) {
    // eps^{-delta} is linear in s; least squares over the last half
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = tr.s.size() / 2; i < tr.s.size(); ++i, ++m) {
      const double x = tr.s[i], w = std::pow(tr.eps[i], -c.delta);
      sx += x, sy += w, sxx += x * x, sxy += x * w;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / m;
    tr.slopeFit = slope;
    tr.s0 = -icpt / slope;
  }
  return tr;
}

const char* toString(RateKind k) { return k == RateKind::Power ? "Power" : "Logarithmic"; }

RateLaw predictRate(const ProfileSolution& prof, const EigenBasis& b, const CouplingConstants* cc, int N) {
  const auto& dc = b.dc;
  if (N < 0 || N > b.maxN) throw Error(ErrorKind::InvalidArgument, "N outside the basis");
  const auto e = eigenvalue(dc, N);
  if (e.lambda < -kNeutralTol)
    throw Error(ErrorKind::NegativeEigenvalue, "lambda_" + std::to_string(N) + " = " + std::to_string(e.lambda) + " < 0");

  RateLaw r;
  r.N = N;
  r.h = prof.h;
  r.Cs = prof.Cs;
  r.cN = b.cOrigin[N];
  r.gamma = dc.gamma;
  r.omega = dc.omega;
  r.delta = dc.delta;
  r.lambda = e.lambda;
  r.beta = e.beta;
  if (cc) r.DN = cc->D.at(N);

  if (std::abs(e.lambda) > kNeutralTol) {
    r.kind = RateKind::Power;
    r.exponent = 0.5 + e.beta;
    r.prefactor = prof.Cs;  // multiplies the data-dependent eps0
    if (cc) r.CN = std::pow(r.h * r.gamma / (r.cN * r.DN * r.delta), 1.0 / r.delta);
    return r;
  }
  if (!cc) throw Error(ErrorKind::InvalidArgument, "neutral mode needs the coupling constants");
  if (dc.regime == Regime::Degenerate) throw Error(ErrorKind::DegenerateRegime, "omega = 2 gamma");
  r.kind = RateKind::Logarithmic;
  r.CN = std::pow(r.h * r.gamma / (r.cN * r.DN * r.delta), 1.0 / r.delta);
  r.exponent = 1.0 / r.delta;
  r.prefactor = r.Cs * r.CN;
  r.gradientSlope = 1.0 / r.prefactor;
  return r;
}

RateLaw predictRate(const ModelParams& p, int N) {
  const auto dc = derive(p);
  const auto e = eigenvalue(dc, N);
  if (e.lambda < -kNeutralTol)
    throw Error(ErrorKind::NegativeEigenvalue, "lambda_" + std::to_string(N) + " = " + std::to_string(e.lambda) + " < 0");
  const auto prof = solveProfile(p);
  const auto basis = buildBasis(p, std::max(N, 1));
  if (dc.regime == Regime::Degenerate) return predictRate(prof, basis, nullptr, N);
  const auto cc = couplingConstants(prof, basis, N, N);
  return predictRate(prof, basis, &cc, N);
}

std::string rateLawJson(const RateLaw& r, int indent) {
  json j;
  j["kind"] = toString(r.kind);
  j["N"] = r.N;
  j["exponent"] = r.exponent;
  j["prefactor"] = r.prefactor;
  if (r.kind == RateKind::Logarithmic) j["gradientSlope"] = r.gradientSlope;
  j["constants"] = {{"h", r.h},       {"Cs", r.Cs},         {"cN", r.cN},         {"DN", r.DN},
                    {"CN", r.CN},     {"delta", r.delta},   {"gamma", r.gamma},   {"omega", r.omega},
                    {"lambda", r.lambda}, {"beta", r.beta}};
  return j.dump(indent);
}

RateLaw rateLawFromJson(const std::string& text) {
  try {
    const auto j = json::parse(text);
    RateLaw r;
    r.kind = j.at("kind").get<std::string>() == "Power" ? RateKind::Power : RateKind::Logarithmic;
    r.N = j.at("N");
    r.exponent = j.at("exponent");
    r.prefactor = j.at("prefactor");
    r.gradientSlope = j.value("gradientSlope", 0.0);
    const auto& c = j.at("constants");
    r.h = c.at("h"), r.Cs = c.at("Cs"), r.cN = c.at("cN"), r.DN = c.at("DN"), r.CN = c.at("CN");
    r.delta = c.at("delta"), r.gamma = c.at("gamma"), r.omega = c.at("omega");
    r.lambda = c.at("lambda"), r.beta = c.at("beta");
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadConfig, std::string("rate law JSON: ") + e.what());
  }
}

CoefficientFlow coefficientFlow(const EpsilonTrajectory& traj, const FlowInput& in) {
  const auto& c = traj.constants;
  const std::size_t m = in.n.size();
  if (in.lambda.size() != m || in.D.size() != m || in.a0.size() != m)
    throw Error(ErrorKind::InvalidArgument, "coefficientFlow: inconsistent input lengths");
  const std::size_t ns = traj.s.size();
  if (ns < 2) throw Error(ErrorKind::InvalidArgument, "trajectory too short");

  // eps on each step by cubic Hermite with the exact ODE slope
  std::vector<double> e = traj.eps, de(ns);
  for (std::size_t i = 0; i < ns; ++i) de[i] = traj.rhs(e[i]);
  const boost::math::interpolators::cardinal_cubic_hermite<std::vector<double>> epsI(std::move(e), std::move(de), 0.0,
                                                                                    traj.ds);
  using GL = boost::math::quadrature::gauss<double, 10>;
  const double p = c.gamma + c.delta, ds = traj.ds, sEnd = traj.s.back();

  // int over [s_i, s_i+ds] of eps^p e^{mu (q - anchor)}
  auto cell = [&](std::size_t i, double mu, double anchor) {
    const double lo = traj.s[i];
    return GL::integrate([&](double q) { return std::pow(epsI(std::min(q, sEnd)), p) * std::exp(mu * (q - anchor)); },
                         lo, lo + ds);
  };

  CoefficientFlow out;
  out.n = in.n;
  out.s = traj.s;
  out.aN.resize(ns);
  for (std::size_t i = 0; i < ns; ++i) out.aN[i] = -(c.h / c.cN) * std::pow(traj.eps[i], c.gamma);
  out.a.assign(m, std::vector<double>(ns, 0.0));
  out.requirement.assign(m, kNaN);

  for (std::size_t j = 0; j < m; ++j) {
    const double lam = in.lambda[j], D = in.D[j];
    auto& a = out.a[j];
    if (in.n[j] >= in.N) {
      if (!in.a0[j]) throw Error(ErrorKind::InvalidArgument, "a_n(0) required for n >= N");
      a[0] = *in.a0[j];
      for (std::size_t i = 0; i + 1 < ns; ++i)
        a[i + 1] = a[i] * std::exp(-lam * ds) + D * cell(i, lam, traj.s[i + 1]);
      continue;
    }
    // n < N: backward recursion for T(s) = int_s^inf eps^p e^{lam (q - s)} dq,
    // the part beyond the trajectory from the exact continuation
    std::vector<double> T(ns);
    boost::math::quadrature::exp_sinh<double> es;
    const double eEnd = traj.eps.back();
    T[ns - 1] = es.integrate(
        [&](double u) { return std::pow(epsilonContinuation(c, sEnd, eEnd, sEnd + u), p) * std::exp(lam * u); }, 0.0,
        INFINITY, 1e-13);
    for (std::size_t i = ns - 1; i-- > 0;) T[i] = cell(i, lam, traj.s[i]) + std::exp(lam * ds) * T[i + 1];
    out.requirement[j] = -D * T[0];
    const double a0 = in.a0[j].value_or(out.requirement[j]);
    for (std::size_t i = 0; i < ns; ++i) a[i] = (a0 + D * T[0]) * std::exp(-lam * traj.s[i]) - D * T[i];
  }
  return out;
}

Codimension codimension(const ModelParams& p, int N) {
  const auto e = eigenvalue(derive(p), N);
  if (e.lambda < -kNeutralTol) throw Error(ErrorKind::NegativeEigenvalue, "lambda_N < 0");
  // one constraint per n < N, one removed by shifting the blow-up time
  return {N, N - 1};
}

double ansatzValue(const ProfileSolution& prof, const EigenBasis& b, int N, double eps, double y) {
  const double K = std::sqrt(eps);
  if (y <= K) return evalU(prof, y / eps);
  return 0.5 * std::numbers::pi - prof.h / b.cOrigin[N] * std::pow(eps, prof.dc.gamma) * b.phi(N, y);
}

AnsatzSnapshot assembleAnsatz(const ProfileSolution& prof, const EigenBasis& b, int N, double eps,
                              const std::vector<double>& y, double s) {
  if (!(eps > 0.0 && eps <= 0.1)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 0.1]");
  if (N < 0 || N > b.maxN) throw Error(ErrorKind::InvalidArgument, "N outside the basis");
  AnsatzSnapshot a;
  a.s = s;
  a.epsilon = eps;
  a.K = std::sqrt(eps);
  a.N = N;
  a.y = y;
  if (a.y.empty())
    for (int i = 0; i <= 400; ++i) a.y.push_back(10.0 * i / 400.0);
  for (double yy : a.y) a.f.push_back(ansatzValue(prof, b, N, eps, yy));
  const double fin = evalU(prof, a.K / eps);
  const double fout = 0.5 * std::numbers::pi - prof.h / b.cOrigin[N] * std::pow(eps, prof.dc.gamma) * b.phi(N, a.K);
  a.jump = std::abs(fin - fout);
  return a;
}

}  // namespace blowup
