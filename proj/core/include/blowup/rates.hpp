#pragma once

#include <cmath>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "blowup/coupling.hpp"
#include "blowup/params.hpp"
#include "blowup/profile.hpp"
#include "blowup/spectral.hpp"

namespace blowup {

struct EpsilonConstants {
  double lambdaN = 0, gamma = 1, DN = 0, cN = 1, h = 1, delta = 1;
  double B() const { return DN * cN / h; }
};

// gamma eps' = -lambda eps - (D c / h) eps^{1+delta}
struct EpsilonTrajectory {
  EpsilonConstants constants;
  double eps0 = 0, ds = 0;
  std::vector<double> s, eps;
  std::optional<double> s0;       // neutral case: fitted from the last half
  std::optional<double> slopeFit; // neutral case: d(eps^-delta)/ds
  double rhs(double e) const;     // eps'(s) as a function of eps
};

struct EpsilonOptions {
  double ds = 0.05;
  double tolerance = 1e-12;
};

EpsilonTrajectory solveEpsilon(const EpsilonConstants& c, double eps0, double sMax = 60.0,
                               const EpsilonOptions& opts = {});

// Exact continuation of the Bernoulli equation from (s1, e1) to s.
double epsilonContinuation(const EpsilonConstants& c, double s1, double e1, double s);

enum class RateKind { Power, Logarithmic };
const char* toString(RateKind k);

struct RateLaw {
  RateKind kind = RateKind::Power;
  int N = 0;
  double exponent = 0;   // 1/2 + beta_N, or 1/delta for the log law
  double prefactor = 0;  // C_s (times the free eps0), or C = C_s C_N
  double gradientSlope = 0;  // log law: slope of sqrt(T-t) d_r u(0,t) in -log(T-t), 1/(C_s C_N)
  double h = 0, Cs = 0, cN = 0, DN = 0, CN = 0, delta = 0, gamma = 0, omega = 0, lambda = 0, beta = 0;
};

RateLaw predictRate(const ProfileSolution& prof, const EigenBasis& b, const CouplingConstants* cc, int N);
// Builds profile, basis and coupling internally.
RateLaw predictRate(const ModelParams& p, int N);

std::string rateLawJson(const RateLaw& r, int indent = 2);
RateLaw rateLawFromJson(const std::string& text);

struct CoefficientFlow {
  std::vector<int> n;
  std::vector<double> s;
  std::vector<std::vector<double>> a;  // a[j][i] = a_{n[j]}(s_i)
  std::vector<double> aN;              // matched -(h/c_N) eps^gamma
  std::vector<double> requirement;     // -D_n int_0^inf eps^{gamma+delta} e^{lambda_n q} dq, for n < N (NaN otherwise)
};

struct FlowInput {
  int N = 0;
  std::vector<int> n;
  std::vector<double> lambda;  // lambda_n
  std::vector<double> D;       // D_n
  std::vector<std::optional<double>> a0;  // empty optional: use the requirement value (n < N only)
};

CoefficientFlow coefficientFlow(const EpsilonTrajectory& traj, const FlowInput& in);

struct Codimension {
  int constraints = 0;
  int effectiveUnstable = 0;
};
Codimension codimension(const ModelParams& p, int N);

struct AnsatzSnapshot {
  double s = 0;  // NaN when not tied to a time
  double epsilon = 0, K = 0;
  int N = 0;
  std::vector<double> y, f;
  double jump = 0;  // |f_inn(K) - f_out(K)|
};

double ansatzValue(const ProfileSolution& prof, const EigenBasis& b, int N, double eps, double y);
AnsatzSnapshot assembleAnsatz(const ProfileSolution& prof, const EigenBasis& b, int N, double eps,
                              const std::vector<double>& y = {}, double s = std::nan(""));

}  // namespace blowup
