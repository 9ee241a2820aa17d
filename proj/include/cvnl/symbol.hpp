#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cvnl::algebra {

// Symbol kinds of the Heisenberg-picture engine.
//
// Operator symbols (never carry negative exponents, never inverted):
//   x_in, p_in        signal quadratures
//   x_anc(k), p_anc(k) ancilla quadratures; k = 0 is the Gaussian carrier
// Classical symbols (commuting scalars; Laurent exponents allowed):
//   outcome_q(k)      homodyne outcome of ancilla k
//   outcome_y         rotated-quadrature outcome (y / cos(theta); see frame)
//   gain_z(k)         QND coupling gain
//   bs_t(k), bs_r(k)  beam-splitter transmissivity / reflectivity
//   chi(k)            nonlinearity parameter of order k
//   theta             tangent of the adaptive measurement phase
//   ratio_g(k)        internal: beam-splitter ratio r_k / t_k
//   loc_u(k)          internal: localization symbol, u_k * (1 + g_k^2) = 1
//   sigma_s(k)        internal: rescaled outcome q_k / t_k
//   aux(k)            internal scratch (perturbations, targets)
//
// The total order of symbols is (kind, index) with kinds ordered exactly as
// the enumerators below. This order is fixed; canonical serialization and
// monomial comparison depend on it.
enum class SymKind : uint8_t {
  x_in = 0,
  p_in = 1,
  x_anc = 2,
  p_anc = 3,
  outcome_q = 4,
  outcome_y = 5,
  gain_z = 6,
  bs_t = 7,
  bs_r = 8,
  chi = 9,
  theta = 10,
  ratio_g = 11,
  loc_u = 12,
  sigma_s = 13,
  aux = 14,
};

inline bool kind_indexed(SymKind k) {
  switch (k) {
    case SymKind::x_in:
    case SymKind::p_in:
    case SymKind::outcome_y:
    case SymKind::theta:
      return false;
    default:
      return true;
  }
}

inline bool kind_operator(SymKind k) {
  return k == SymKind::x_in || k == SymKind::p_in || k == SymKind::x_anc ||
         k == SymKind::p_anc;
}

// Packed symbol id preserving the documented (kind, index) order.
using SymbolId = uint32_t;

struct Symbol {
  SymKind kind;
  int index;  // 0 when the kind is unindexed

  Symbol(SymKind k, int i = 0) : kind(k), index(i) {
    if (!kind_indexed(k) && i != 0)
      throw std::invalid_argument("symbol kind takes no index");
    if (i < 0 || i > 0xFFFF) throw std::invalid_argument("symbol index range");
  }

  SymbolId id() const {
    return (static_cast<uint32_t>(kind) << 16) | static_cast<uint32_t>(index);
  }
  static Symbol from_id(SymbolId s) {
    return Symbol(static_cast<SymKind>(s >> 16), static_cast<int>(s & 0xFFFF));
  }
};

inline bool id_operator(SymbolId s) {
  return kind_operator(static_cast<SymKind>(s >> 16));
}

inline std::string sym_name(SymbolId s) {
  Symbol y = Symbol::from_id(s);
  std::string ix = std::to_string(y.index);
  switch (y.kind) {
    case SymKind::x_in: return "x_in";
    case SymKind::p_in: return "p_in";
    case SymKind::x_anc: return "x_A" + ix;
    case SymKind::p_anc: return "p_A" + ix;
    case SymKind::outcome_q: return "q" + ix;
    case SymKind::outcome_y: return "y";
    case SymKind::gain_z: return "z" + ix;
    case SymKind::bs_t: return "t" + ix;
    case SymKind::bs_r: return "r" + ix;
    case SymKind::chi: return "chi" + ix;
    case SymKind::theta: return "theta";
    case SymKind::ratio_g: return "g" + ix;
    case SymKind::loc_u: return "u" + ix;
    case SymKind::sigma_s: return "s" + ix;
    case SymKind::aux: return "aux" + ix;
  }
  return "?";
}

// Convenience constructors.
inline SymbolId sym_x_in() { return Symbol(SymKind::x_in).id(); }
inline SymbolId sym_p_in() { return Symbol(SymKind::p_in).id(); }
inline SymbolId sym_x_anc(int k) { return Symbol(SymKind::x_anc, k).id(); }
inline SymbolId sym_p_anc(int k) { return Symbol(SymKind::p_anc, k).id(); }
inline SymbolId sym_q(int k) { return Symbol(SymKind::outcome_q, k).id(); }
inline SymbolId sym_y() { return Symbol(SymKind::outcome_y).id(); }
inline SymbolId sym_z(int k) { return Symbol(SymKind::gain_z, k).id(); }
inline SymbolId sym_t(int k) { return Symbol(SymKind::bs_t, k).id(); }
inline SymbolId sym_r(int k) { return Symbol(SymKind::bs_r, k).id(); }
inline SymbolId sym_chi(int k) { return Symbol(SymKind::chi, k).id(); }
inline SymbolId sym_theta() { return Symbol(SymKind::theta).id(); }
inline SymbolId sym_g(int k) { return Symbol(SymKind::ratio_g, k).id(); }
inline SymbolId sym_u(int k) { return Symbol(SymKind::loc_u, k).id(); }
inline SymbolId sym_sigma(int k) { return Symbol(SymKind::sigma_s, k).id(); }
inline SymbolId sym_aux(int k) { return Symbol(SymKind::aux, k).id(); }

}  // namespace cvnl::algebra
