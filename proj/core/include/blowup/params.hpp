#pragma once

#include <optional>

namespace blowup {

struct ModelParams {
  double d = 7.0;  // real on purpose; integer only matters geometrically
  int k = 1;
  std::optional<int> N;
};

enum class Regime { InnerDominated, OuterDominated, Degenerate };

const char* toString(Regime r);

struct DerivedConstants {
  double d = 0, K = 0;  // K = k(d+k-2), coefficient of the sine term
  int k = 1;
  double omega = 0, gamma = 0, dStar = 0, delta = 0;
  double muPlus = 0, muMinus = 0;
  Regime regime = Regime::InnerDominated;
};

struct SpectrumEntry {
  int n = 0;
  double lambda = 0;
  double beta = 0;
};

struct Classification {
  std::optional<int> neutralIndex;
  int minAdmissibleN = 0;
  double stabilityBound = 0;  // k/2; every admissible N exceeds it
  int unstableDirections(int N) const { return N - 1; }
};

double criticalDimension(int k);

// Throws SubcriticalDimension for d <= d*. The degenerate case w = 2g is
// flagged in `regime`; consumers that cannot handle it throw DegenerateRegime.
DerivedConstants derive(const ModelParams& p);

SpectrumEntry eigenvalue(const DerivedConstants& c, int n);
SpectrumEntry eigenvalue(const ModelParams& p, int n);

Classification classify(const DerivedConstants& c);
Classification classify(const ModelParams& p);

bool isGeometric(const ModelParams& p);  // integer d

}  // namespace blowup
