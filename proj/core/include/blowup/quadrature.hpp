#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace blowup {

// Generalised Laguerre polynomial L_n^(a)(z) by the three-term recurrence.
double laguerre(int n, double alpha, double z);
// L_0..L_n in one sweep
std::vector<double> laguerreAll(int n, double alpha, double z);

// Gauss rule for int_0^inf f(z) z^alpha e^{-z} dz.
struct GaussLaguerreRule {
  double alpha = 0;
  std::vector<double> nodes;
  std::vector<double> weights;  // underflowed weights are stored as 0

  double integrate(const std::function<double(double)>& f) const;
};

// Cached and shared across threads; nodes from Golub-Welsch, polished by Newton.
std::shared_ptr<const GaussLaguerreRule> gaussLaguerre(int n, double alpha);

}  // namespace blowup
