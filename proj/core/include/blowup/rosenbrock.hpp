#pragma once

#include <array>
#include <vector>

namespace blowup {

// ROS3: three stages, order 3 with an embedded order-2 estimate, L-stable.
struct Ros3 {
  static constexpr double gamma = 0.43586652150845899941601945119356;
  static constexpr double c21 = -1.0156171083877702091975600115545;
  static constexpr double c31 = 4.0759956452537699824805835358067;
  static constexpr double c32 = 9.2076794298330791242156818474003;
  static constexpr std::array<double, 3> m{1.0, 6.1697947043828245592553615689730,
                                           -0.42772256543218573326238373806514};
  static constexpr std::array<double, 3> e{0.5, -2.9079558716805469821718236208017,
                                           0.22354069897811569627360909276199};
};

// System must provide:
//   void rhs(const std::vector<double>& y, std::vector<double>& f);
//   void factor(double hg);              // prepares W = I/hg - J at the step start
//   void solve(std::vector<double>& b);  // b <- W^{-1} b
template <class System>
void ros3Step(System& sys, const std::vector<double>& y, double h, std::vector<double>& ynew,
              std::vector<double>& err) {
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), f(n), y2(n);
  sys.factor(h * Ros3::gamma);

  sys.rhs(y, f);
  k1 = f;
  sys.solve(k1);

  // A21 = A31 = 1, A32 = 0: stages two and three share F(y + k1)
  for (std::size_t i = 0; i < n; ++i) y2[i] = y[i] + k1[i];
  sys.rhs(y2, f);
  for (std::size_t i = 0; i < n; ++i) k2[i] = f[i] + Ros3::c21 / h * k1[i];
  sys.solve(k2);
  for (std::size_t i = 0; i < n; ++i) k3[i] = f[i] + (Ros3::c31 * k1[i] + Ros3::c32 * k2[i]) / h;
  sys.solve(k3);

  ynew.resize(n);
  err.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ynew[i] = y[i] + Ros3::m[0] * k1[i] + Ros3::m[1] * k2[i] + Ros3::m[2] * k3[i];
    err[i] = Ros3::e[0] * k1[i] + Ros3::e[1] * k2[i] + Ros3::e[2] * k3[i];
  }
}

// Thomas algorithm for a[i] x[i-1] + b[i] x[i] + c[i] x[i+1] = d[i]; d is overwritten with x.
void solveTridiagonal(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& c,
                      std::vector<double>& d);

// Pentadiagonal matrix, row i holds columns i-2..i+2. LU without pivoting.
class Pentadiagonal {
 public:
  void resize(std::size_t n) { rows_.assign(n, {0, 0, 0, 0, 0}); }
  std::size_t size() const { return rows_.size(); }
  double& operator()(std::size_t i, int offset) { return rows_[i][offset + 2]; }
  void factor();
  void solve(std::vector<double>& b) const;

 private:
  std::vector<std::array<double, 5>> rows_;
};

}  // namespace blowup
