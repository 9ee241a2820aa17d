#pragma once

// Closed-form Gaussian moment propagation: mean vector and covariance over
// quadratures (x_1, p_1, x_2, p_2, ...) pushed through the symplectic matrix
// of each Gaussian element. Independent of the wavefunction simulator; grid
// moments must agree with these to high accuracy on adequate grids.

#include <array>
#include <cmath>
#include <vector>

namespace cvnl::testsupport {

struct GaussianModel {
  int modes = 1;
  std::vector<double> mean;              // 2 * modes
  std::vector<std::vector<double>> cov;  // (2m) x (2m), symmetric

  static GaussianModel vacuum(int modes) {
    GaussianModel g;
    g.modes = modes;
    g.mean.assign(2 * modes, 0.0);
    g.cov.assign(2 * modes, std::vector<double>(2 * modes, 0.0));
    for (int i = 0; i < 2 * modes; ++i) g.cov[i][i] = 0.5;
    return g;
  }

  // S acts on the quadrature vector: out = S in (+ shift)
  void apply(const std::vector<std::vector<double>>& S) {
    const int d = 2 * modes;
    std::vector<double> nm(d, 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) nm[i] += S[i][j] * mean[j];
    std::vector<std::vector<double>> t(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) {
        if (S[i][k] == 0.0) continue;
        for (int j = 0; j < d; ++j) t[i][j] += S[i][k] * cov[k][j];
      }
    std::vector<std::vector<double>> nc(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) nc[i][j] += t[i][k] * S[j][k];
    mean = std::move(nm);
    cov = std::move(nc);
  }

  std::vector<std::vector<double>> identity() const {
    const int d = 2 * modes;
    std::vector<std::vector<double>> S(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i) S[i][i] = 1.0;
    return S;
  }

  // x_a -> x_a - z x_s, p_s -> p_s + z p_a  (modes s=0, a=1)
  void qnd(double z) {
    auto S = identity();
    S[2][0] = -z;  // x_a row
    S[1][3] = z;   // p_s row
    apply(S);
  }

  // x_1 -> t x_1 + r x_2, x_2 -> t x_2 - r x_1, same on p
  void beamsplitter(double t, double r) {
    auto S = identity();
    S[0][0] = t; S[0][2] = r;
    S[2][2] = t; S[2][0] = -r;
    S[1][1] = t; S[1][3] = r;
    S[3][3] = t; S[3][1] = -r;
    apply(S);
  }

  // single mode m: x -> x cos + p sin, p -> -x sin + p cos
  void rotate(int m, double theta) {
    auto S = identity();
    double c = std::cos(theta), s = std::sin(theta);
    S[2 * m][2 * m] = c;
    S[2 * m][2 * m + 1] = s;
    S[2 * m + 1][2 * m] = -s;
    S[2 * m + 1][2 * m + 1] = c;
    apply(S);
  }

  // x -> x / s, p -> s p
  void squeeze(int m, double s) {
    auto S = identity();
    S[2 * m][2 * m] = 1.0 / s;
    S[2 * m + 1][2 * m + 1] = s;
    apply(S);
  }

  void displace_p(int m, double d) { mean[2 * m + 1] += d; }

  // x-squeezed (k = 0 resource): Var(x) = 0.5 shrink, Var(p) = 0.5 / shrink
  void set_mode_squeezing_db(int m, double db, bool squeeze_x) {
    double shrink = std::pow(10.0, -db / 10.0);
    cov[2 * m][2 * m] = squeeze_x ? 0.5 * shrink : 0.5 / shrink;
    cov[2 * m + 1][2 * m + 1] = squeeze_x ? 0.5 / shrink : 0.5 * shrink;
  }
};

}  // namespace cvnl::testsupport
