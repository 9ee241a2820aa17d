#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace cvnl::sim {

// Uniform position grid on [-L, L): x_j = -L + j dx, dx = 2L/n. Momentum
// half-range (Nyquist) is pi/dx; signed frequencies come in DFT bin order,
// bin j holding k = j dk for j < n/2 and (j - n) dk above, dk = pi/L.
struct GridSpec {
  int n = 512;
  double L = 8.0;

  double dx() const { return 2.0 * L / n; }
  double dk() const { return M_PI / L; }
  double k_max() const { return M_PI / dx(); }
  double x(int j) const { return -L + j * dx(); }
  double k(int j) const { return (j < n / 2 ? j : j - n) * dk(); }

  void validate() const {
    if (n < 64 || (n & (n - 1)) != 0)
      throw std::invalid_argument("grid n_points must be a power of two >= 64");
    if (!(L > 0.0))
      throw std::invalid_argument("grid half-width must be positive");
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.n == b.n && a.L == b.L;
  }
};

}  // namespace cvnl::sim
