#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cvnl/gains.hpp"
#include "cvnl/rng.hpp"
#include "cvnl/statesim.hpp"

namespace cvnl::circuits {

// Monte-Carlo run of one adaptive gate. For gate "cubic" chi is the realized
// target strength of exp(-i chi x^3); the QND coupling z is derived from the
// order-3 resource strength unless overridden. For gate "quartic" chi is the
// strength chi4 of the order-4 resource and the comparison unitary uses the
// derived effective strength (see quartic_oracle_chi).
struct CircuitConfig {
  std::string gate = "cubic";  // cubic | quartic
  double chi = 0.05;

  sim::AncillaSpec carrier{0, 0.0, 10.0};  // quartic carrier resource
  double t0 = 0.9;                         // carrier tap transmissivity
  double t4 = 0.9;                         // fixed order-4 splitter

  // Nonlinear resources. Empty selects the defaults: cubic {k=3, chi},
  // quartic {k=4, chi} + {k=3, 0.1}, all at squeezing_db.
  std::vector<sim::AncillaSpec> ancillas;
  double squeezing_db = 10.0;

  // Cubic QND coupling; NaN derives -cbrt(chi / chi3) so the slice phase
  // lands exactly on the target cubic.
  double z = std::numeric_limits<double>::quiet_NaN();

  sim::GridSpec grid{512, 8.0};          // signal axis
  sim::GridSpec carrier_grid{256, 4.0};  // quartic carrier axis

  int trajectories = 200;
  std::uint64_t seed = 1;
  std::string sampling = "stratified";  // stratified | iid (first outcome)

  // Diagnostic pinning of homodyne values in circuit order:
  // cubic {q}, quartic {q4, q3[, y]}. Entries beyond the list are sampled.
  std::vector<double> forced_outcomes;
  bool keep_states = false;
};

struct TrajectoryRecord {
  int index = 0;
  std::vector<double> outcomes;  // cubic {q}; quartic {q4, q3, y}
  double t3 = 1.0, r3 = 0.0;     // realized adaptive splitter (quartic)
  double theta = 0.0;            // realized readout rotation (quartic)
  double chi2 = 0.0;             // realized quadratic correction (cubic)
  double p_disp = 0.0;           // applied momentum displacement
  double fidelity = 0.0;
  double out_mean_x = 0.0, out_var_x = 0.0;
  double out_mean_p = 0.0, out_var_p = 0.0;
  int resampled = 0;           // rotation-guard / interpolation-cap retries
  int boundary_warnings = 0;   // grid-edge mass events along the trajectory
  int n_fine = 0;              // carrier readout upsampling length (quartic)
  std::optional<sim::ModeState> state;
};

struct RunResult {
  CircuitConfig config;  // resolved form actually run
  double oracle_chi = 0.0;
  std::vector<TrajectoryRecord> records;
  double mean_fidelity = 0.0;
  double std_fidelity = 0.0;  // population std over trajectories
  double mean_var_x = 0.0;    // mean output Var(x); carries the tap noise
  int total_resampled = 0;
  int total_boundary_warnings = 0;
};

// The ideal comparison unitary exp(-i chi x^order) applied in place.
sim::ModeState oracle(const sim::ModeState& input, double chi, int order);

// Effective strength realized by the quartic cascade on the pre-amplified
// input: nonlinear_phase with chi_o = -chi4 r0^4 r4^4 / (t0^4 t4^4), the
// sign following the +x^3 momentum shift of the derived output relation.
double quartic_oracle_chi(double chi4, double t0, double t4);

// Fills defaulted ancillas, derives z, and validates gate/resource
// consistency. Throws std::invalid_argument on contradictions.
CircuitConfig resolve(const CircuitConfig& cfg);

RunResult run_cubic(const CircuitConfig& cfg);
RunResult run_cubic(const CircuitConfig& cfg, const sim::ModeState& input);
RunResult run_quartic(const CircuitConfig& cfg);
RunResult run_quartic(const CircuitConfig& cfg, const sim::ModeState& input);

// Reference cubic trajectory holding the order-3 resource on an explicit
// second grid axis (tensor / qnd / grid homodyne / correction unitaries).
// Squeezing-limited by the resource's x spread; kept as an independent
// check of the analytic-resource path. Always retains the output state.
TrajectoryRecord cubic_joint_reference(const CircuitConfig& cfg,
                                       const sim::ModeState& input,
                                       rng::SplitMix64& gen);

// Exact-algebra certification of one scheme, wrapping the Heisenberg
// derivation and the solved feed-forward program at reference outcomes.
// Schemes: qnd-inline, qnd-measurement-induced, beamsplitter (3 <= N <= 8,
// beamsplitter capped at 6), quartic-optical (N = 4).
struct SymbolicReport {
  int N = 0;
  std::string scheme;
  bool residual_zero = false;
  std::vector<bool> structural_ok;  // beamsplitter coefficient-form checks
  bool quartic_term_match = false;  // quartic-optical only
  bool cube_root_certified = false;
  std::string final_relation;  // canonical x_out / p_out text
  gains::GainProgram program;
  double forward_residual = 0.0;
  bool pass = false;
  std::vector<std::string> notes;
};
SymbolicReport symbolic_run(int N, const std::string& scheme, double chi = 1.0,
                            const gains::OutcomeVector* outcomes = nullptr);

}  // namespace cvnl::circuits
