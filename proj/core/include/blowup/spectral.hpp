#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "blowup/params.hpp"
#include "blowup/quadrature.hpp"

namespace blowup {

using RadialFn = std::function<double(double)>;

// phi_n(y) = N_n y^{-gamma} L_n^{(omega/2)}(y^2/4), orthonormal in
// L^2(y^{d-1} e^{-y^2/4} dy).
struct EigenBasis {
  ModelParams params;
  DerivedConstants dc;
  int maxN = 0;
  double alpha = 0;                  // omega/2
  std::vector<double> normClosed;    // closed-form N_n before rescaling
  std::vector<double> norm;          // N_n after rescaling
  std::vector<double> cOrigin;       // c_n = N_n L_n(0)
  std::vector<double> lambda;
  std::shared_ptr<const GaussLaguerreRule> rule;
  double orthoResidual = 0;

  double phi(int n, double y) const;
  std::vector<double> phiAll(double y) const;
};

EigenBasis buildBasis(const ModelParams& p, int maxN);

double laguerreAtZero(int n, double alpha);  // Gamma(n+1+a)/(n! Gamma(1+a))

// int_0^inf f g y^{d-1} e^{-y^2/4} dy. smallYExponent is the declared power
// of f*g at y -> 0; it is factored into the Gauss weight.
double innerProduct(double d, const RadialFn& f, const RadialFn& g, double smallYExponent = 0.0);
double innerProduct(const EigenBasis& b, const RadialFn& f, const RadialFn& g, double smallYExponent = 0.0);

double defaultProjectionRange(const EigenBasis& b);

// a_n = <psi, phi_n> restricted to [0, yMax], n = 0..maxN
std::vector<double> project(const RadialFn& psi, const EigenBasis& b, double yMax = 0.0);

std::vector<std::vector<double>> gramMatrix(const EigenBasis& b);

void writeBasisCsv(const EigenBasis& b, std::ostream& os, double yMin = 0.05, double yMax = 20.0, int points = 400);

}  // namespace blowup
