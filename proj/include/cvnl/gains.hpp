#pragma once

#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvnl/frame.hpp"

namespace cvnl::gains {

using algebra::Poly;

// Measured homodyne values driving the feed-forward. Keys are restricted to
// 2..N; the order-1 readout is never used.
struct OutcomeVector {
  std::map<int, double> q;
  std::optional<double> y;  // rotated readout of the carrier, when present
};

// One solved feed-forward step. The defining relation is
// value^root_degree = rhs evaluated at the outcomes and the already-solved
// later steps; `rhs` is an exact polynomial over outcome and gain symbols, so
// causality is checkable by walking its symbols. For kind "phase" the value
// is atan(rhs), for "displacement" it is rhs itself.
struct GainStep {
  int k = 0;
  std::string kind;  // coupling | ratio | phase | displacement
  int root_degree = 1;
  Poly rhs;
  std::complex<double> value{0.0, 0.0};
  std::complex<double> t{0.0, 0.0};  // ratio steps only
  std::complex<double> r{0.0, 0.0};
  bool real = true;
};

// Solved adaptive program, steps emitted highest order first (the order of
// physical application).
struct GainProgram {
  int N = 0;
  std::string scheme;  // qnd | beamsplitter | quartic-optical
  double target_chi = 0.0;
  std::string convention;
  bool all_real = true;
  int first_complex_equation = -1;  // index m of the x^m equation, -1 if none
  std::vector<GainStep> steps;
};

// Triangular solve of the coupling-gain system: z_N^N = chi_N, then each
// lower equation solved for its single new gain. Root policy: odd degrees
// take the unique real root; an even degree with negative real right-hand
// side switches that step (and the program) to the principal complex root
// and records the offending equation index.
GainProgram solve_qnd_gains(int N, double chi_N, const OutcomeVector& outcomes);

// Beam-splitter variant solved natively in the ratio variables g_j = r_j/t_j
// with rescaled outcomes s_j = q_j/t_j: the effective coefficients
// t_j r_j prod_{k=j..N} t_k^-2 then satisfy the same cancellation system.
// Ratios are normalized to t_k^2 + r_k^2 = 1 with positive (principal) t_k.
GainProgram solve_bs_ratios(int N, double chi_N, const OutcomeVector& outcomes);

struct QuarticFeedforward {
  double r3_over_t3 = 0.0;
  double theta = 0.0;
  double t3 = 1.0;
  double r3 = 0.0;
};

// Closed-form adaptive settings of the quartic optical scheme: the third
// splitter ratio is the real cube root of -(4 chi4 r4^3 q4)/(chi3 t4) and
// theta the phase of the rotated carrier readout.
QuarticFeedforward quartic_feedforward(double chi3, double chi4, double t0,
                                       double t4, double q4, double q3);

// Thrown when |cos(theta)| falls below the guard: the trajectory is
// pathological and should be resampled.
class RotationNearPi2 : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kCosThetaGuard = 1e-6;

// Final momentum displacement of the quartic scheme; q2 is the rotated
// carrier readout value y.
double quartic_displacement(double chi3, double chi4, double t0, double t4,
                            double r3_over_t3, double q4, double q3, double q2,
                            double theta);

// Assembled three-step quartic program (ratio, phase, displacement) for
// serialization and diagnostics.
GainProgram make_quartic_program(double chi3, double chi4, double t0,
                                 double t4, double q4, double q3, double y);

// Recurrence causality: every step k references only outcomes measured after
// it (q_m with m > k, the rotated readout counting as order 2) and only
// later adaptive steps. Throws std::logic_error naming the violation.
void check_causality(const GainProgram& p);

// Max absolute residual coefficient of the derived final relation with the
// program's numeric gains substituted; certifies a solved program when below
// 1e-10 times the target scale. Valid for schemes qnd and beamsplitter.
double forward_residual_error(const GainProgram& p,
                              const OutcomeVector& outcomes);

}  // namespace cvnl::gains
