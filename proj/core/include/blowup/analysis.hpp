#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blowup/fitting.hpp"
#include "blowup/meshsim.hpp"
#include "blowup/profile.hpp"
#include "blowup/rates.hpp"
#include "blowup/spectral.hpp"

namespace blowup {

// Generic blow-up mode: the smallest admissible N.
int genericMode(const ModelParams& p);
// LogFit when lambda of the generic mode vanishes, PowerFit otherwise.
FitKind expectedFitKind(const ModelParams& p);

// Fits the trace with the law appropriate to (d, k). NoBlowup if the run did not reach the stop.
FitResult fitTrace(const RunTrace& tr, const ModelParams& p);

struct LogPlotRow {
  double x, y;  // -log(T-t), sqrt(T-t) d_r u(0,t)
};
std::vector<LogPlotRow> logPlot(const RunTrace& tr, long double T);

struct Overlay {
  double s = 0, eps = 0;
  std::vector<double> y, f, fAnsatz;
  double supDistance = 0;  // over [2 eps, 1]
  double supLocation = 0;
};

// eps = C_s / (sqrt(T-t) d_r u(0,t)); compares the snapshot with the N-mode ansatz.
// InvalidArgument when eps leaves (0, 0.1] or 2 eps >= 1.
Overlay overlaySnapshot(const Snapshot& snap, long double T, const ProfileSolution& prof, const EigenBasis& b, int N,
                        int points = 1000);

struct CompareReport {
  std::string status;
  double d = 0;
  int k = 1, N = 1;
  RateLaw predicted;
  std::optional<FitResult> fit;
  // power: beta; log: slope C of sqrt(T-t) d_r u(0,t) against -log(T-t)
  double predictedValue = 0, fittedValue = 0, relativeError = 0;
  double ratioToSlopeConstant = 0;  // fitted C / (1/(C_s C_N))
  double ratioToProduct = 0;        // fitted C / (C_s C_N)
  std::vector<Overlay> overlays;    // snapshots with eps in range, in time order
  std::string error;                // message when the fit stage failed
};

CompareReport compareRun(const RunTrace& tr, const ModelParams& p);
std::string compareJson(const std::vector<CompareReport>& reports, const std::vector<std::string>& names, int indent = 2);

}  // namespace blowup
