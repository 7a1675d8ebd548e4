#include "blowup/rosenbrock.hpp"

#include <algorithm>

#include "blowup/error.hpp"

namespace blowup {

void solveTridiagonal(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& c,
                      std::vector<double>& d) {
  const std::size_t n = d.size();
  std::vector<double> cp(n);
  double beta = b[0];
  if (beta == 0.0) throw Error(ErrorKind::InvalidArgument, "singular tridiagonal system");
  cp[0] = c[0] / beta;
  d[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    beta = b[i] - a[i] * cp[i - 1];
    if (beta == 0.0) throw Error(ErrorKind::InvalidArgument, "singular tridiagonal system");
    cp[i] = (i + 1 < n ? c[i] : 0.0) / beta;
    d[i] = (d[i] - a[i] * d[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= cp[i] * d[i + 1];
}

void Pentadiagonal::factor() {
  const std::size_t n = rows_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double piv = rows_[k][2];
    if (piv == 0.0) throw Error(ErrorKind::InvalidArgument, "singular banded system");
    for (std::size_t i = k + 1; i < std::min(n, k + 3); ++i) {
      const int off = static_cast<int>(k) - static_cast<int>(i);  // -1 or -2
      double& l = rows_[i][off + 2];
      l /= piv;
      for (int c = 1; c <= 2 && k + c < n; ++c) rows_[i][off + c + 2] -= l * rows_[k][c + 2];
    }
  }
}

void Pentadiagonal::solve(std::vector<double>& b) const {
  const std::size_t n = rows_.size();
  for (std::size_t i = 1; i < n; ++i) {
    b[i] -= rows_[i][1] * b[i - 1];
    if (i >= 2) b[i] -= rows_[i][0] * b[i - 2];
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    if (i + 1 < n) s -= rows_[i][3] * b[i + 1];
    if (i + 2 < n) s -= rows_[i][4] * b[i + 2];
    b[i] = s / rows_[i][2];
  }
}

}  // namespace blowup
