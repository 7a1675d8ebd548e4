#include "blowup/params.hpp"

#include <cmath>
#include <sstream>

#include "blowup/error.hpp"

namespace blowup {

const char* toString(Regime r) {
  switch (r) {
    case Regime::InnerDominated: return "InnerDominated";
    case Regime::OuterDominated: return "OuterDominated";
    case Regime::Degenerate: return "Degenerate";
  }
  return "?";
}

double criticalDimension(int k) { return 2.0 + k * (2.0 + 2.0 * std::sqrt(2.0)); }

DerivedConstants derive(const ModelParams& p) {
  if (p.k < 1) throw Error(ErrorKind::InvalidArgument, "k must be a positive integer");
  if (p.N && *p.N < 0) throw Error(ErrorKind::InvalidArgument, "N must be non-negative");
  if (!std::isfinite(p.d)) throw Error(ErrorKind::InvalidArgument, "d must be finite");

  DerivedConstants c;
  c.d = p.d;
  c.k = p.k;
  c.K = p.k * (p.d + p.k - 2.0);
  c.dStar = criticalDimension(p.k);

  const double a = p.d - 2.0 * (p.k + 1);
  const double disc = a * a - 8.0 * p.k * p.k;
  if (p.d <= c.dStar || disc <= 0.0) {
    std::ostringstream os;
    os << "d=" << p.d << " <= d*=" << c.dStar << " for k=" << p.k;
    throw Error(ErrorKind::SubcriticalDimension, os.str());
  }
  c.omega = std::sqrt(disc);
  c.gamma = 0.5 * (p.d - 2.0 - c.omega);
  c.muPlus = -c.gamma;
  c.muMinus = -c.gamma - c.omega;
  c.delta = std::min(c.omega, 2.0 * c.gamma);

  const double gap = c.omega - 2.0 * c.gamma;
  if (std::abs(gap) <= 1e-12 * std::max(1.0, c.omega))
    c.regime = Regime::Degenerate;
  else
    c.regime = gap < 0 ? Regime::InnerDominated : Regime::OuterDominated;

  // d-2-g = g+w; both sides are computed independently on purpose
  const double lhs = p.d - 2.0 - c.gamma, rhs = c.gamma + c.omega;
  if (std::abs(lhs - rhs) > 1e-13 * std::max(1.0, std::abs(lhs)))
    throw Error(ErrorKind::InvalidArgument, "gamma/omega identity broken");
  return c;
}

SpectrumEntry eigenvalue(const DerivedConstants& c, int n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "n must be non-negative");
  SpectrumEntry e;
  e.n = n;
  e.lambda = -0.5 * c.gamma + n;
  e.beta = -0.5 + 2.0 * n / (c.d - 2.0 - c.omega);
  return e;
}

SpectrumEntry eigenvalue(const ModelParams& p, int n) { return eigenvalue(derive(p), n); }

Classification classify(const DerivedConstants& c) {
  Classification out;
  const double n0 = (c.d - 2.0 - c.omega) / 4.0;
  const double r = std::round(n0);
  if (std::abs(n0 - r) <= 1e-12) out.neutralIndex = static_cast<int>(r);
  out.minAdmissibleN = out.neutralIndex ? *out.neutralIndex : static_cast<int>(std::ceil(n0));
  out.stabilityBound = 0.5 * c.k;
  return out;
}

Classification classify(const ModelParams& p) { return classify(derive(p)); }

bool isGeometric(const ModelParams& p) { return p.d == std::floor(p.d); }

}  // namespace blowup
