#pragma once

#include <cstdint>
#include <vector>

#include "cvnl/statesim.hpp"

namespace cvnl::metrics {

struct VarianceReport {
  int k = 0;
  double chi = 0.0;
  double value = 0.0;        // Var(p - k chi x^(k-1))
  double vacuum_ratio = 0.0; // value / (1/2); below 1 means squeezed
};

// |<a|b>|^2; states must share a grid
double fidelity(const sim::ModeState& a, const sim::ModeState& b);

// p applied spectrally, x^(k-1) pointwise; k = 0 or chi = 0 reduces to Var(p)
VarianceReport nonlinear_variance(const sim::ModeState& s, int k, double chi);

// Nonlinear squeezing requirement for the quartic cascade: the order-3
// ancilla's nonlinear variance must sit below the inverse variance of the
// signed real cube root of the order-4 ancilla's position.
struct Eq17Report {
  double lhs = 0.0;       // Var(p - 3 chi3 x^2) on a3
  double rhs = 0.0;       // 1 / Var(x^(1/3)) on a4
  double margin = 0.0;    // rhs / lhs
  bool satisfied = false; // margin > 1
};
Eq17Report eq17_criterion(const sim::ModeState& a3, const sim::ModeState& a4,
                          double chi3);

struct BootstrapCI {
  double lo = 0.0, hi = 0.0;
};
// percentile bootstrap for the sample mean; deterministic in seed
BootstrapCI bootstrap_mean_ci(const std::vector<double>& xs, int resamples,
                              double level, std::uint64_t seed);

}  // namespace cvnl::metrics
