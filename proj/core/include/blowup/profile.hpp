#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "blowup/params.hpp"

namespace blowup {

struct ProfileOptions {
  std::optional<double> xMin;  // default -12/k
  std::optional<double> xMax;  // default max(23/omega, 19.7/gamma)
  double tolerance = 1e-12;    // relative tolerance of the adaptive integrator
  std::optional<double> step;  // output grid spacing, default 0.004/k
};

struct TailFit {
  double h = 0, hMinus = 0, fitResidual = 0;
  double windowStart = 0, windowEnd = 0;
};

class ProfileInterp;

// Heteroclinic orbit of v'' + (d-2)v' + K sin v = 0, v = 2U* - pi, x = log xi.
struct ProfileSolution {
  ModelParams params;
  DerivedConstants dc;
  double xMin = 0, xMax = 0, dx = 0, tolerance = 0;
  std::vector<double> grid, v, vPrime;
  double h = 0, hMinus = 0, fitResidual = 0;
  double Cs = 0, slopeArgmax = 0;  // slopeArgmax = xi* (0 means the xi->0 limit)
  double xSwitch = 0;
  std::shared_ptr<const ProfileInterp> interp;

  double evalV(double x) const;       // v(x), tail/series outside the stored orbit
  double evalVPrime(double x) const;  // dv/dx
};

ProfileSolution solveProfile(const ModelParams& p, const ProfileOptions& opts = {});

// Two-exponential least squares on the last 30% of [0, xMax].
TailFit extractTail(const ProfileSolution& sol);

double evalU(const ProfileSolution& sol, double xi);
double evalDUdxi(const ProfileSolution& sol, double xi);

double slopeNormalization(const ProfileSolution& sol);

struct FluxSample {
  double v = 0, lowerFlux = 0, upperFlux = 0;
};

struct TrappingReport {
  double maxLowerViolation = 0, maxUpperViolation = 0;  // > 0 means outside
  double maxRelLowerViolation = 0, maxRelUpperViolation = 0;
  std::vector<FluxSample> boundaryFluxSamples;
  double minBoundaryFlux = 0;
};

TrappingReport checkTrapping(const ProfileSolution& sol, int fluxSamples = 64);

// Vector field evaluated on the boundary curves, dotted with the inward normals.
double lowerBoundaryFlux(const DerivedConstants& dc, double v);
double upperBoundaryFlux(const DerivedConstants& dc, double v);

void writeOrbitCsv(const ProfileSolution& sol, std::ostream& os);

}  // namespace blowup
