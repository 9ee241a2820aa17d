#include "cvnl/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace cvnl::algebra {

Monomial Monomial::var(SymbolId s, int e) {
  Monomial m;
  if (e != 0) m.f.push_back({s, e});
  m.validate();
  return m;
}

int Monomial::exp_of(SymbolId s) const {
  for (const auto& [sym, e] : f)
    if (sym == s) return e;
  return 0;
}

int Monomial::operator_degree() const {
  int d = 0;
  for (const auto& [sym, e] : f)
    if (id_operator(sym)) d += e;
  return d;
}

bool Monomial::has_operator() const {
  for (const auto& [sym, e] : f) {
    (void)e;
    if (id_operator(sym)) return true;
  }
  return false;
}

void Monomial::validate() const {
  for (const auto& [sym, e] : f) {
    if (e == 0) throw std::logic_error("monomial: zero exponent stored");
    if (e < 0 && id_operator(sym))
      throw std::logic_error("monomial: negative operator exponent " +
                             sym_name(sym));
  }
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.f.reserve(a.f.size() + b.f.size());
  size_t i = 0, j = 0;
  while (i < a.f.size() || j < b.f.size()) {
    if (j == b.f.size() || (i < a.f.size() && a.f[i].first < b.f[j].first)) {
      out.f.push_back(a.f[i++]);
    } else if (i == a.f.size() || b.f[j].first < a.f[i].first) {
      out.f.push_back(b.f[j++]);
    } else {
      int e = a.f[i].second + b.f[j].second;
      if (e != 0) out.f.push_back({a.f[i].first, e});
      ++i;
      ++j;
    }
  }
  out.validate();
  return out;
}

Monomial Monomial::pow(int e) const {
  Monomial out;
  if (e == 0) return out;
  out.f = f;
  for (auto& [sym, ex] : out.f) {
    (void)sym;
    ex *= e;
  }
  out.validate();
  return out;
}

bool Monomial::divisible_by(const Monomial& pat) const {
  for (const auto& [sym, e] : pat.f) {
    if (e <= 0)
      throw std::logic_error("rewrite pattern needs positive exponents");
    if (exp_of(sym) < e) return false;
  }
  return true;
}

Monomial Monomial::divide(const Monomial& pat) const {
  Monomial out;
  out.f.reserve(f.size());
  size_t j = 0;
  for (const auto& [sym, e] : f) {
    int sub = 0;
    while (j < pat.f.size() && pat.f[j].first < sym) ++j;
    if (j < pat.f.size() && pat.f[j].first == sym) sub = pat.f[j].second;
    int r = e - sub;
    if (r != 0) out.f.push_back({sym, r});
  }
  return out;
}

bool mono_precedes(const Monomial& a, const Monomial& b) {
  size_t i = 0, j = 0;
  while (i < a.f.size() && j < b.f.size()) {
    if (a.f[i].first < b.f[j].first) {
      // a has a factor on an earlier symbol that b lacks (exponent 0 in b).
      return a.f[i].second > 0;
    }
    if (b.f[j].first < a.f[i].first) {
      return b.f[j].second < 0;
    }
    if (a.f[i].second != b.f[j].second) return a.f[i].second > b.f[j].second;
    ++i;
    ++j;
  }
  if (i < a.f.size()) return a.f[i].second > 0;
  if (j < b.f.size()) return b.f[j].second < 0;
  return false;
}

Poly::Poly(const CRat& c) {
  if (!c.is_zero()) t_.emplace(Monomial::one(), c);
}

Poly Poly::var(SymbolId s, int e) { return term(CRat(1), Monomial::var(s, e)); }

Poly Poly::term(const CRat& c, const Monomial& m) {
  Poly p;
  p.add_term(c, m);
  return p;
}

void Poly::add_term(const CRat& c, const Monomial& m) {
  if (c.is_zero()) return;
  auto it = t_.find(m);
  if (it == t_.end()) {
    t_.emplace(m, c);
  } else {
    it->second += c;
    if (it->second.is_zero()) t_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.t_) add_term(c, m);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.t_) add_term(-c, m);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a.t_)
    for (const auto& [mb, cb] : b.t_) out.add_term(ca * cb, ma * mb);
  return out;
}

Poly Poly::operator-() const {
  Poly out;
  for (const auto& [m, c] : t_) out.t_.emplace(m, -c);
  return out;
}

Poly Poly::scaled(const CRat& c) const {
  Poly out;
  if (c.is_zero()) return out;
  for (const auto& [m, cc] : t_) out.t_.emplace(m, c * cc);
  return out;
}

Poly Poly::mul_mono(const CRat& c, const Monomial& m) const {
  Poly out;
  if (c.is_zero()) return out;
  for (const auto& [mm, cc] : t_) out.add_term(c * cc, mm * m);
  return out;
}

Poly Poly::pow(int e) const {
  if (e < 0) throw std::logic_error("poly pow: negative exponent");
  Poly acc(CRat(1));
  Poly base = *this;
  while (e > 0) {
    if (e & 1) acc = acc * base;
    if (e > 1) base = base * base;
    e >>= 1;
  }
  return acc;
}

bool Poly::contains(SymbolId s) const {
  for (const auto& [m, c] : t_) {
    (void)c;
    if (m.exp_of(s) != 0) return true;
  }
  return false;
}

int Poly::max_exp(SymbolId s) const {
  int mx = 0;
  for (const auto& [m, c] : t_) {
    (void)c;
    mx = std::max(mx, m.exp_of(s));
  }
  return mx;
}

bool Poly::classical_only() const {
  for (const auto& [m, c] : t_) {
    (void)c;
    if (m.has_operator()) return false;
  }
  return true;
}

Poly Poly::substitute(SymbolId s, const Poly& rep) const {
  // Cache rep^e for the exponents that actually occur.
  std::map<int, Poly> powers;
  powers.emplace(0, Poly(CRat(1)));
  Poly out;
  for (const auto& [m, c] : t_) {
    int e = m.exp_of(s);
    if (e == 0) {
      out.add_term(c, m);
      continue;
    }
    if (e < 0)
      throw std::logic_error("substitute: negative exponent of " +
                             sym_name(s) + "; use substitute_mono");
    auto it = powers.find(e);
    if (it == powers.end()) it = powers.emplace(e, rep.pow(e)).first;
    Monomial rest = m.divide(Monomial::var(s, e));
    out += it->second.mul_mono(c, rest);
  }
  return out;
}

Poly Poly::substitute_mono(SymbolId s, const CRat& c,
                           const Monomial& m) const {
  Poly out;
  for (const auto& [mm, cc] : t_) {
    int e = mm.exp_of(s);
    if (e == 0) {
      out.add_term(cc, mm);
      continue;
    }
    Monomial rest = mm.divide(Monomial::var(s, e));
    out.add_term(cc * c.pow(e), rest * m.pow(e));
  }
  return out;
}

Poly Poly::coeff_of_operators(const Monomial& ops) const {
  Poly out;
  for (const auto& [m, c] : t_) {
    Monomial op, cl;
    for (const auto& [sym, e] : m.f)
      (id_operator(sym) ? op : cl).f.push_back({sym, e});
    if (op == ops) out.add_term(c, cl);
  }
  return out;
}

std::map<Monomial, Poly, MonoLess> Poly::by_operators() const {
  std::map<Monomial, Poly, MonoLess> out;
  for (const auto& [m, c] : t_) {
    Monomial op, cl;
    for (const auto& [sym, e] : m.f)
      (id_operator(sym) ? op : cl).f.push_back({sym, e});
    out[op].add_term(c, cl);
  }
  return out;
}

std::complex<double> Poly::eval(
    const std::map<SymbolId, std::complex<double>>& bind) const {
  std::complex<double> acc = 0.0;
  for (const auto& [m, c] : t_) {
    std::complex<double> v = c.to_complex();
    for (const auto& [sym, e] : m.f) {
      auto it = bind.find(sym);
      if (it == bind.end())
        throw std::invalid_argument("eval: unbound symbol " + sym_name(sym));
      v *= std::pow(it->second, e);
    }
    acc += v;
  }
  return acc;
}

std::string Poly::str() const {
  if (t_.empty()) return "0";
  std::string s;
  for (const auto& [m, c] : t_) {
    if (!s.empty()) s += " + ";
    s += c.str();
    for (const auto& [sym, e] : m.f) {
      s += "*" + sym_name(sym);
      if (e != 1) s += "^" + std::to_string(e);
    }
  }
  return s;
}

Poly rewrite_fixpoint(Poly p, const std::vector<RewriteRule>& rules,
                      int max_passes) {
  for (int pass = 0; pass < max_passes; ++pass) {
    bool changed = false;
    for (const auto& rule : rules) {
      // Collect matches first; applying a rule rebuilds the term map.
      Poly delta;
      for (const auto& [m, c] : p.terms()) {
        if (!m.divisible_by(rule.pat)) continue;
        Monomial rest = m.divide(rule.pat);
        delta -= Poly::term(c, m);
        delta += rule.rhs.mul_mono(c, rest);
        changed = true;
      }
      if (changed) {
        p += delta;
        break;  // restart rule order on the reduced polynomial
      }
    }
    if (!changed) return p;
  }
  throw std::runtime_error("rewrite_fixpoint: pass limit exceeded");
}

}  // namespace cvnl::algebra
