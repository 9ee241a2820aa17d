#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cvnl/rational.hpp"
#include "cvnl/symbol.hpp"

namespace cvnl::algebra {

// Power product over symbols. Factors are kept sorted by SymbolId with
// nonzero exponents. Operator symbols must keep nonnegative exponents;
// classical symbols may carry negative (Laurent) exponents.
struct Monomial {
  std::vector<std::pair<SymbolId, int>> f;

  static Monomial one() { return {}; }
  static Monomial var(SymbolId s, int e = 1);

  bool is_one() const { return f.empty(); }
  int exp_of(SymbolId s) const;
  int operator_degree() const;
  bool has_operator() const;
  void validate() const;  // throws on negative operator exponents

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  Monomial pow(int e) const;  // scales all exponents by e

  // Componentwise divisibility by a pattern with strictly positive exponents.
  bool divisible_by(const Monomial& pat) const;
  Monomial divide(const Monomial& pat) const;

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.f == b.f;
  }
};

// Canonical monomial precedence: walk the union of symbols of both monomials
// in the documented symbol order (absent symbol = exponent 0); at the first
// symbol where exponents differ, the monomial with the LARGER exponent
// precedes. Hence positive powers precede the constant, which precedes
// negative powers. Serialization and map iteration both follow this order.
bool mono_precedes(const Monomial& a, const Monomial& b);

struct MonoLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return mono_precedes(a, b);
  }
};

// Exact multivariate polynomial with complex-rational coefficients over
// quadrature and classical symbols (Laurent exponents on classical symbols).
class Poly {
 public:
  using TermMap = std::map<Monomial, CRat, MonoLess>;

  Poly() = default;
  explicit Poly(const CRat& c);
  explicit Poly(long v) : Poly(CRat(v)) {}
  static Poly var(SymbolId s, int e = 1);
  static Poly term(const CRat& c, const Monomial& m);

  bool is_zero() const { return t_.empty(); }
  size_t term_count() const { return t_.size(); }
  const TermMap& terms() const { return t_; }

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly operator-() const;
  friend bool operator==(const Poly& a, const Poly& b) { return a.t_ == b.t_; }

  Poly scaled(const CRat& c) const;
  Poly mul_mono(const CRat& c, const Monomial& m) const;  // exact, any exps
  Poly pow(int e) const;                                  // e >= 0

  bool contains(SymbolId s) const;
  int max_exp(SymbolId s) const;  // 0 when absent
  bool classical_only() const;    // no operator symbols

  // Replace every occurrence of s (exponent must be >= 0 wherever s appears)
  // by the polynomial rep, expanding powers.
  Poly substitute(SymbolId s, const Poly& rep) const;
  // Replace s by c * m; handles negative exponents exactly.
  Poly substitute_mono(SymbolId s, const CRat& c, const Monomial& m) const;

  // Coefficient polynomial of the exact operator part `ops` (a monomial made
  // of operator symbols only): sum of classical parts of all terms whose
  // operator content equals ops.
  Poly coeff_of_operators(const Monomial& ops) const;
  // Split into (operator monomial -> classical coefficient polynomial).
  std::map<Monomial, Poly, MonoLess> by_operators() const;

  std::complex<double> eval(
      const std::map<SymbolId, std::complex<double>>& bind) const;

  // Canonical text form: terms in canonical monomial order, each rendered as
  // coeff*sym^e*... with exact rational coefficients; the zero polynomial is
  // "0".
  std::string str() const;

  void add_term(const CRat& c, const Monomial& m);

 private:
  TermMap t_;
};

inline Poly operator*(const CRat& c, const Poly& p) { return p.scaled(c); }
inline Poly operator*(const Poly& p, const CRat& c) { return p.scaled(c); }

// One-directional rewrite rule: any term divisible by `pat` (strictly
// positive pattern exponents) has pat replaced by `rhs`. Applying a rule
// subtracts a multiple of (pat - rhs), so a zero normal form certifies
// membership in the ideal generated by the rules' relations.
struct RewriteRule {
  Monomial pat;
  Poly rhs;
};

// Reduce p by the rules until no rule applies; rules are tried in order on
// each pass. Throws if max_passes is exceeded (non-terminating system).
Poly rewrite_fixpoint(Poly p, const std::vector<RewriteRule>& rules,
                      int max_passes = 100000);

}  // namespace cvnl::algebra
