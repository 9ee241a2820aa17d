#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cvnl/polynomial.hpp"

namespace cvnl::algebra {

// Mode id of the signal; ancilla modes use their order k >= 0 as id
// (0 is the Gaussian carrier).
inline constexpr int kSignalMode = -1;

// One recorded homodyne event: the measured operator expression was set equal
// to the classical outcome symbol, and `eliminated` (one initial operator
// symbol of the measured mode) was solved for and substituted everywhere.
struct Measurement {
  int mode = 0;
  SymbolId outcome = 0;
  Poly measured_expr;   // operator expression whose eigenvalue was read out
  SymbolId eliminated;  // x_anc(k) for position readout, p_anc(k) for momentum
  Poly inversion;       // eliminated = inversion, in surviving symbols
};

// Heisenberg-picture bookkeeping: current (x̂, p̂) of every live mode as exact
// polynomials in the initial operator symbols and classical symbols. All
// operations are pure: they take the frame by value and return the update.
struct HeisenbergFrame {
  std::map<int, std::pair<Poly, Poly>> modes;
  std::vector<Measurement> measurements;

  const std::pair<Poly, Poly>& mode(int id) const;
  bool live(int id) const { return modes.count(id) != 0; }
  const Measurement* measurement_for(int mode_id) const;
};

// Fresh modes carry their own initial operator symbols: the signal uses
// (x_in, p_in), ancilla k uses (x_Ak, p_Ak).
HeisenbergFrame add_signal(HeisenbergFrame f);
HeisenbergFrame add_ancilla(HeisenbergFrame f, int k);

// QND coupling x̂_s p̂_A at strength `gain` (classical symbols only):
// p̂_s += gain * p̂_A, x̂_A -= gain * x̂_s; the other two quadratures are
// untouched.
HeisenbergFrame qnd_apply(HeisenbergFrame f, int signal, int ancilla,
                          const Poly& gain);

// Beam splitter (t, r classical): x̂_1 <- t x̂_1 + r x̂_2,
// x̂_2 <- t x̂_2 - r x̂_1(old), same map on p̂. The orientation is fixed so
// that coupling (carrier, ancilla) puts t*carrier + r*ancilla in slot 1 and
// the measured port t*ancilla - r*carrier in slot 2.
HeisenbergFrame bs_apply(HeisenbergFrame f, int m1, int m2, const Poly& t,
                         const Poly& r);

// Outcome-dependent Gaussian correction: x̂ <- x̂/squeeze + displace_x,
// p̂ <- p̂/squeeze + displace_p. `squeeze` must be a single nonzero classical
// term (so the division is an exact Laurent multiply). With squeeze = 1/t
// this multiplies both quadratures by t, the bookkeeping the measured-port
// correction step needs; the map is intentionally not symplectic (the formal
// bracket picks up squeeze^-2), which frame_poisson_bracket exposes.
HeisenbergFrame gaussian_correct(HeisenbergFrame f, int mode,
                                 const Poly& squeeze, const Poly& displace_p,
                                 const Poly& displace_x = Poly());

// Homodyne of the position quadrature of `mode`: records
// measured_expr = current x̂ = outcome, solves it for the mode's own initial
// x symbol (whose coefficient must be a single classical term), substitutes
// the solution into every live expression and stored inversion, and retires
// the mode. The mode's initial p symbol survives for later elimination.
HeisenbergFrame measure_x(HeisenbergFrame f, int mode, SymbolId outcome);

// Homodyne of the rotated quadrature tan_theta * x̂ + p̂ of `mode`; the
// outcome symbol denotes (measured value)/cos(theta). Solves for the mode's
// initial p symbol and retires the mode.
HeisenbergFrame measure_rotated(HeisenbergFrame f, int mode,
                                const Poly& tan_theta, SymbolId outcome);

// Formal displacement channel: p̂_mode += coeff * p̂_Ak for a fresh order-k
// ancilla that is never beam-split into x̂. Used for the order-1 step of the
// beam-splitter chain, where the resource acts as a pure momentum
// displacement.
HeisenbergFrame add_p_channel(HeisenbergFrame f, int mode, int k,
                              const Poly& coeff);

// Idealized nonlinear ancilla property: p̂_Ak -> coeff * x̂_Ak^(k-1), with
// x̂_Ak taken from the recorded position-readout inversion of ancilla k.
// k = 1 needs no measurement (empty product: p̂_A1 -> coeff).
HeisenbergFrame substitute_ancilla_nonlinearity(HeisenbergFrame f, int k,
                                                const Poly& coeff = Poly(1));

// Apply rewrite rules (e.g. the circle relations r^2 -> 1 - t^2) to every
// live expression and stored inversion.
HeisenbergFrame frame_reduce(HeisenbergFrame f,
                             const std::vector<RewriteRule>& rules);

// Formal Poisson bracket {x̂_m1, p̂_m2} of the linear parts, as a classical
// polynomial: sum over initial modes of dx1/dx dx2/dp - dx1/dp dx2/dx.
Poly frame_poisson_bracket(const HeisenbergFrame& f, int m1, int m2);

// p_out - p_in - target_coeff * x_in^(N-1); the zero polynomial certifies a
// gain program.
Poly residual(const Poly& p_out, int N, const Poly& target_coeff);

inline constexpr int kOrderMin = 3;
inline constexpr int kOrderMax = 8;

// Full adaptive-scheme derivation with all ancilla operators eliminated.
struct DerivedRelation {
  int N = 0;
  std::string scheme;
  Poly x_out;
  Poly p_out;
  // p̂ of the signal before the nonlinearity substitutions, ancilla momenta
  // still present; its p̂_Ak coefficients are the scheme's effective gains.
  Poly p_noise_form;
  std::vector<std::string> notes;
};

// scheme: "qnd-inline", "qnd-measurement-induced", or "beamsplitter";
// 3 <= N <= kOrderMax.
DerivedRelation derive_final_relation(int N, const std::string& scheme);

// Rewrite systems encoding the solved gain towers; reducing the residual of
// the corresponding derivation to the literal zero polynomial is the
// certificate. Targets use chi(N) as the x^(N-1) coefficient.
std::vector<RewriteRule> qnd_tower_rules(int N);
std::vector<RewriteRule> bs_tower_rules(int N);

// Rewrites a beam-splitter-scheme polynomial into the localized gain-ratio
// variables: r_j -> g_j t_j, q_j -> s_j t_j; per-index t_j powers must then
// cancel up to even inverse powers (throws if not), and each leftover
// t_k^-2 becomes a (1 + g_k^2) factor via t_k^-2 = 1 + (r_k/t_k)^2.
Poly bs_localize(Poly p, int N);

// Symbolic certificate for one scheme: derives the relation, substitutes the
// solved-gain tower, and reports whether the residual is the zero polynomial.
struct SchemeCertificate {
  int N = 0;
  std::string scheme;
  bool residual_zero = false;
  std::string reduced_residual;  // canonical text, "0" on success
  // beamsplitter only: per-step pass of the effective-coefficient form
  // coeff(p̂_Aj) == t_j r_j prod_{k=j..N} t_k^-2.
  std::vector<bool> structural_ok;
  std::vector<std::string> notes;
};
SchemeCertificate certify_scheme(int N, const std::string& scheme);

// Fig.-2 style quartic derivation: mechanical circuit composition, outcome
// symbols re-expanded to their defining operator expressions, compared
// term-exactly against the target output-operator forms with the adaptive
// cube root represented by the ratio symbol g3.
struct QuarticDerivation {
  Poly x_derived, p_derived;
  Poly x_expected, p_expected;
  Poly x_diff, p_diff;  // reduced; both zero == certified
  bool cube_root_certified = false;
  bool x_exact = false;
  bool p_exact = false;
  std::vector<std::string> notes;
};
QuarticDerivation derive_quartic_optical();

}  // namespace cvnl::algebra
