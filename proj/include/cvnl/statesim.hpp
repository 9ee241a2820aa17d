#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "cvnl/grid.hpp"
#include "cvnl/rng.hpp"

// Position-basis wavefunction simulator. Quadrature convention [x,p] = i,
// vacuum variance 1/2. All operations are value-semantic: inputs are never
// mutated. Unitary operations preserve the L2 norm to 1e-10 (they do not
// renormalize); any output whose edge amplitude exceeds 1e-6 bumps a global
// warning counter instead of failing.

namespace cvnl::sim {

using cplx = std::complex<double>;

struct ModeState {
  GridSpec grid;
  std::vector<cplx> amp;  // amp[j] = psi(x_j)
};

// Two-mode wavefunction, row-major: amp[i * grid_a.n + j] = Psi(x_s_i, x_a_j).
// Created by tensor(), destroyed by homodyne collapse.
struct JointState {
  GridSpec grid_s;
  GridSpec grid_a;
  std::vector<cplx> amp;
};

// order k = 0 denotes the Gaussian carrier (squeezed in x). For k >= 1 the
// state is exp(i chi_k x^k) times the Gaussian whose p variance is squeezed,
// so the nonlinear quadrature p - k chi_k x^(k-1) has variance
// (1/2) 10^(-db/10) by construction.
struct AncillaSpec {
  int k = 3;
  double chi_k = 0.0;
  double squeezing_db = 0.0;
};

inline constexpr GridSpec kDefaultModeGrid{512, 8.0};
inline constexpr GridSpec kDefaultJointGrid{256, 8.0};

double norm(const ModeState& s);
double norm(const JointState& s);
double boundary_amplitude(const ModeState& s);
double boundary_amplitude(const JointState& s);
int boundary_warnings();
void reset_boundary_warnings();

// configurable n_s * n_a guard for tensor()
std::size_t tensor_cap();
void set_tensor_cap(std::size_t cap);

struct ModeMoments {
  double mean_x, mean_p, var_x, var_p, cov_xp;
};
ModeMoments mode_moments(const ModeState& s);

// quadrature order: x_s, p_s, x_a, p_a; cov symmetrized
struct JointMoments {
  std::array<double, 4> mean;
  std::array<std::array<double, 4>, 4> cov;
};
JointMoments joint_moments(const JointState& s);

ModeState make_vacuum(const GridSpec& grid);
ModeState make_ancilla(const AncillaSpec& spec, const GridSpec& grid);
JointState tensor(const ModeState& s, const ModeState& a);

// Which x quadrature drives the QND coupling. signal_x: x_s kicks p_a,
// so x_a -> x_a - z x_s and p_s -> p_s + z p_a (the Heisenberg map the
// covariance tests pin down); ancilla_x is the mirrored coupling.
enum class QndDirection { signal_x, ancilla_x };
JointState qnd(JointState s, double z,
               QndDirection dir = QndDirection::signal_x);

// x_s -> t x_s + r x_a, x_a -> t x_a - r x_s (same on p), realized as three
// FFT cross-shears at angle phi = atan2(r, t); requires t > 0.
JointState beamsplitter(JointState s, double t, double r);

// x -> x cos(theta) + p sin(theta), chirp / momentum-chirp / chirp
// decomposition with parity range reduction to |theta| <= pi/2
ModeState phase_rotate(ModeState s, double theta);

// psi(x) -> sqrt(s) psi(s x) by band-limited (periodic sinc) interpolation;
// Heisenberg x -> x/s, p -> s p
ModeState squeeze(ModeState st, double s);

ModeState displace_p(ModeState s, double d);    // e^{+i d x}
ModeState nonlinear_phase(ModeState s, double chi, int order);  // e^{-i chi x^N}

enum class Axis { signal, ancilla };
struct HomodyneResult {
  double outcome;
  ModeState kept;  // the unmeasured mode, renormalized conditional slice
};
// Inverse-CDF draw from the exact grid marginal of the measured axis with
// intra-bin linear interpolation; consumes exactly one uniform variate.
HomodyneResult homodyne_x(const JointState& s, Axis measured,
                          rng::SplitMix64& gen);

// flat binary container (magic, grid params, float32 re/im pairs)
void save_mode(const ModeState& s, const std::string& path);
ModeState load_mode(const std::string& path);

}  // namespace cvnl::sim
