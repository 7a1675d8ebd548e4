#pragma once

#include <string>
#include <vector>

namespace blowup {

enum class FitKind { PowerFit, LogFit };
const char* toString(FitKind k);

struct FitResult {
  FitKind kind = FitKind::PowerFit;
  long double T = 0;       // blow-up time estimate
  double deltaT = 0;       // T - t_last
  double beta = 0, exponent = 0, uncertainty = 0;  // power: G ~ (T-t)^{-exponent}, exponent = 1/2 + beta
  double C = 0, s0 = 0;    // log: sqrt(T-t) G = C (-log(T-t) - s0)^{1/delta}
  double delta = 1;
  double residual = 0;     // RMS relative residual in the window
  double r2 = 0;
  long double windowStart = 0, windowEnd = 0;
  int nPoints = 0;
};

struct PowerFitOptions {
  double decades = 3.0;  // window: last decades of T-t
  int minPoints = 12;
};

struct LogFitOptions {
  double efolds = 6.0;  // window: last e-foldings of -log(T-t)
  double delta = 1.0;
  int minPoints = 12;
};

// G(t) is the blowing-up observable, e.g. d_r u(0,t). Throws WindowTooShort, DegenerateFit.
FitResult fitPower(const std::vector<long double>& t, const std::vector<double>& G, const PowerFitOptions& o = {});
FitResult fitLog(const std::vector<long double>& t, const std::vector<double>& G, const LogFitOptions& o = {});

}  // namespace blowup
