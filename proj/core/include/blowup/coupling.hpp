#pragma once

#include <optional>
#include <vector>

#include "blowup/params.hpp"
#include "blowup/profile.hpp"
#include "blowup/spectral.hpp"

namespace blowup {

// sin(x) - x without cancellation for small x
double sinMinusId(double x);

double gFunction(const ProfileSolution& prof, double xi);

// int_0^inf g(xi) xi^{d-3-gamma} dxi, numerically up to xCut (default: the
// profile's xSwitch) plus the closed-form tail beyond it.
double innerIntegral(const ProfileSolution& prof, std::optional<double> xCut = {});
double innerConstant(const ProfileSolution& prof, const EigenBasis& b, int n, std::optional<double> xCut = {});

// int_0^inf phi_N^3 phi_n y^{d-3} e^{-y^2/4} dy
double outerIntegral(const EigenBasis& b, int N, int n, int nodes = 200);
double outerConstant(const ProfileSolution& prof, const EigenBasis& b, int N, int n, int nodes = 200);

struct CouplingDiagnostics {
  double innerIntegralValue = 0;  // NaN when divergent (outer regime)
  double outerIntegralValue = 0;  // NaN when divergent (inner regime)
  double crossoverScaleK = 0;     // K = sqrt(eps) at the reference eps
};

struct CouplingConstants {
  ModelParams params;
  DerivedConstants dc;
  Regime regime = Regime::InnerDominated;
  int N = 0;
  std::vector<double> D;
  double delta = 0;
  CouplingDiagnostics diagnostics;
};

CouplingConstants couplingConstants(const ProfileSolution& prof, const EigenBasis& b, int N, int maxN);

// The two halves of <F(psi), phi_n> split at y = K with the global ansatz
// inserted, evaluated with the full nonlinearity.
struct TruncatedIntegrals {
  double eps = 0, K = 0, inner = 0, outer = 0;
  double subdominantRatio = 0;  // outer/inner or inner/outer, per regime
};

TruncatedIntegrals truncatedIntegrals(const ProfileSolution& prof, const EigenBasis& b, int N, int n, double eps,
                                      std::optional<double> K = {});

}  // namespace blowup
