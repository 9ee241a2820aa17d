#include "cvnl/gains.hpp"

#include <cmath>

namespace cvnl::gains {

using namespace cvnl::algebra;

namespace {

constexpr double kImagTol = 1e-12;

bool nearly_real(std::complex<double> v) {
  return std::abs(v.imag()) <= kImagTol * std::max(1.0, std::abs(v.real()));
}

// principal root under the real-preference policy; real_ok reports whether
// the result stayed on the real axis
std::complex<double> nth_root(std::complex<double> v, int n, bool& real_ok) {
  if (n == 1) {
    real_ok = nearly_real(v);
    return v;
  }
  if (nearly_real(v)) {
    double x = v.real();
    if (x == 0.0) {
      real_ok = true;
      return {0.0, 0.0};
    }
    if (n % 2 == 1) {
      real_ok = true;
      return {std::copysign(std::pow(std::abs(x), 1.0 / n), x), 0.0};
    }
    if (x > 0.0) {
      real_ok = true;
      return {std::pow(x, 1.0 / n), 0.0};
    }
    real_ok = false;
    return std::polar(std::pow(-x, 1.0 / n), M_PI / n);
  }
  real_ok = false;
  return std::exp(std::log(v) / double(n));
}

void require_outcomes(int N, const OutcomeVector& o) {
  for (const auto& [k, v] : o.q) {
    (void)v;
    if (k < 2 || k > N)
      throw std::invalid_argument("outcome q" + std::to_string(k) +
                                  " outside 2.." + std::to_string(N));
  }
  for (int k = 2; k <= N; ++k)
    if (o.q.find(k) == o.q.end())
      throw std::invalid_argument("missing outcome q" + std::to_string(k));
}

int pattern_index(const RewriteRule& rule, SymKind kind, int* degree) {
  for (const auto& [s, e] : rule.pat.f) {
    Symbol y = Symbol::from_id(s);
    if (y.kind == kind) {
      *degree = e;
      return y.index;
    }
  }
  return -1;
}

}  // namespace

GainProgram solve_qnd_gains(int N, double chi_N, const OutcomeVector& o) {
  require_outcomes(N, o);
  GainProgram p;
  p.N = N;
  p.scheme = "qnd";
  p.target_chi = chi_N;
  p.convention =
      "target p_out = p_in + chi_N x_in^(N-1); gate-level chi relates by "
      "c = -N chi (conversion in circuits)";
  std::map<SymbolId, std::complex<double>> bind;
  bind[sym_chi(N)] = chi_N;
  for (const auto& [k, v] : o.q) bind[sym_q(k)] = v;
  for (const auto& rule : qnd_tower_rules(N)) {
    int degree = 0;
    int k = pattern_index(rule, SymKind::gain_z, &degree);
    GainStep st;
    st.k = k;
    st.kind = "coupling";
    st.root_degree = degree;
    st.rhs = rule.rhs;
    st.value = nth_root(rule.rhs.eval(bind), degree, st.real);
    bind[sym_z(k)] = st.value;
    if (!st.real) {
      p.all_real = false;
      if (p.first_complex_equation < 0) p.first_complex_equation = k - 1;
    }
    p.steps.push_back(std::move(st));
  }
  return p;
}

GainProgram solve_bs_ratios(int N, double chi_N, const OutcomeVector& o) {
  require_outcomes(N, o);
  GainProgram p;
  p.N = N;
  p.scheme = "beamsplitter";
  p.target_chi = chi_N;
  p.convention =
      "g_k = r_k/t_k with t_k^2 + r_k^2 = 1, t_k principal; effective "
      "coefficient t_k r_k prod_{j=k..N} t_j^-2";
  // collect the gain rules (skip the localization rules), solve highest first
  std::map<int, const RewriteRule*> gain_rules;
  auto rules = bs_tower_rules(N);
  for (const auto& rule : rules) {
    int degree = 0;
    int k = pattern_index(rule, SymKind::ratio_g, &degree);
    if (k >= 1 && degree == k && rule.pat.f.size() == 1) gain_rules[k] = &rule;
  }
  std::map<SymbolId, std::complex<double>> bind;
  bind[sym_chi(N)] = chi_N;
  for (int k = N; k >= 1; --k) {
    const RewriteRule& rule = *gain_rules.at(k);
    GainStep st;
    st.k = k;
    st.kind = "ratio";
    st.root_degree = k;
    st.rhs = rule.rhs;
    std::complex<double> g = nth_root(rule.rhs.eval(bind), k, st.real);
    st.value = g;
    if (std::abs(1.0 + g * g) < 1e-12)
      throw std::invalid_argument("ratio step " + std::to_string(k) +
                                  ": transmissivity undefined (1 + g^2 ~ 0)");
    st.t = 1.0 / std::sqrt(1.0 + g * g);
    st.r = g * st.t;
    if (!st.real) {
      p.all_real = false;
      if (p.first_complex_equation < 0) p.first_complex_equation = k - 1;
    }
    bind[sym_g(k)] = g;
    bind[sym_u(k)] = st.t * st.t;
    bind[sym_sigma(k)] = (k >= 2 ? o.q.at(k) : 0.0) / st.t;
    p.steps.push_back(std::move(st));
  }
  return p;
}

QuarticFeedforward quartic_feedforward(double chi3, double chi4, double t0,
                                       double t4, double q4, double q3) {
  if (!(t4 > 0.0 && t4 < 1.0))
    throw std::invalid_argument("t4 must lie in (0,1)");
  if (!(t0 > 0.0 && t0 <= 1.0))
    throw std::invalid_argument("t0 must lie in (0,1]");
  if (chi3 == 0.0) throw std::invalid_argument("chi3 = 0: ratio undefined");
  double r4 = std::sqrt(1.0 - t4 * t4);
  QuarticFeedforward ff;
  ff.r3_over_t3 = std::cbrt(-(4.0 * chi4 * r4 * r4 * r4 * q4) / (chi3 * t4));
  ff.t3 = 1.0 / std::sqrt(1.0 + ff.r3_over_t3 * ff.r3_over_t3);
  ff.r3 = ff.r3_over_t3 * ff.t3;
  double tan_theta =
      -(6.0 * chi3 * ff.r3 * ff.r3 / ff.t3) * q3 -
      (12.0 * chi4 * r4 * r4 * ff.t3 * ff.t3 / (t4 * t4)) *
          (t4 * t4 - r4 * r4) * q4 * q4;
  ff.theta = std::atan(tan_theta);
  (void)t0;
  return ff;
}

double quartic_displacement(double chi3, double chi4, double t0, double t4,
                            double r3_over_t3, double q4, double q3, double q2,
                            double theta) {
  double c = std::cos(theta);
  if (std::abs(c) < kCosThetaGuard)
    throw RotationNearPi2("rotation too close to pi/2");
  double r0 = std::sqrt(1.0 - t0 * t0);
  double r4 = std::sqrt(1.0 - t4 * t4);
  double t3 = 1.0 / std::sqrt(1.0 + r3_over_t3 * r3_over_t3);
  double r3 = r3_over_t3 * t3;
  double t4sq = t4 * t4;
  double disp = -(4.0 * chi4 * r0 * r4 / (t0 * t4sq * t4sq)) * q4 * q4 * q4;
  double s = (r4 * r3 / t4) * q4 + q3;
  disp += -(3.0 * chi3 * r0 * r3 / (t0 * t4 * t3 * t3 * t3)) * s * s;
  disp += -(r0 * r4 / (t0 * t4sq * t3 * t3)) * std::tan(theta) *
          (q4 + (t4 * r3 / r4) * q3);
  disp += (r0 / (t0 * t4 * t3 * c)) * q2;
  return disp;
}

GainProgram make_quartic_program(double chi3, double chi4, double t0,
                                 double t4, double q4, double q3, double y) {
  QuarticFeedforward ff = quartic_feedforward(chi3, chi4, t0, t4, q4, q3);
  GainProgram p;
  p.N = 4;
  p.scheme = "quartic-optical";
  p.target_chi = chi4;
  p.convention =
      "g3 = r3/t3 real cube root; theta = atan(rhs); displacement applied to "
      "the output momentum; w stands for y / cos(theta)";
  const Poly t4v = Poly::var(sym_t(4)), r4v = Poly::var(sym_r(4));
  const Poly t3v = Poly::var(sym_t(3)), r3v = Poly::var(sym_r(3));
  const Poly r0v = Poly::var(sym_r(0));
  const Poly chi3v = Poly::var(sym_chi(3)), chi4v = Poly::var(sym_chi(4));
  const Poly q4v = Poly::var(sym_q(4)), q3v = Poly::var(sym_q(3));
  auto ipow = [](SymbolId s, int e) { return Poly::var(s, e); };

  GainStep ratio;
  ratio.k = 3;
  ratio.kind = "ratio";
  ratio.root_degree = 3;
  ratio.rhs = CRat(-4) * chi4v * ipow(sym_chi(3), -1) * ipow(sym_t(4), -1) *
              r4v.pow(3) * q4v;
  ratio.value = ff.r3_over_t3;
  ratio.t = ff.t3;
  ratio.r = ff.r3;
  p.steps.push_back(ratio);

  GainStep phase;
  phase.k = 2;
  phase.kind = "phase";
  phase.root_degree = 1;
  phase.rhs = CRat(-6) * chi3v * r3v * r3v * ipow(sym_t(3), -1) * q3v -
              CRat(12) * chi4v * r4v * r4v * t3v * t3v * ipow(sym_t(4), -2) *
                  (t4v * t4v - r4v * r4v) * q4v * q4v;
  phase.value = ff.theta;
  p.steps.push_back(phase);

  GainStep disp;
  disp.k = 1;
  disp.kind = "displacement";
  disp.root_degree = 1;
  disp.rhs = CRat(-4) * chi4v * r0v * r4v * ipow(sym_t(0), -1) *
                 ipow(sym_t(4), -4) * q4v.pow(3) -
             CRat(3) * chi3v * r0v * r3v * ipow(sym_t(0), -1) *
                 ipow(sym_t(4), -1) * ipow(sym_t(3), -3) *
                 (r4v * r3v * ipow(sym_t(4), -1) * q4v + q3v).pow(2) -
             r0v * r4v * ipow(sym_t(0), -1) * ipow(sym_t(4), -2) *
                 ipow(sym_t(3), -2) * Poly::var(sym_theta()) *
                 (q4v + t4v * r3v * ipow(sym_r(4), -1) * q3v) +
             r0v * ipow(sym_t(0), -1) * ipow(sym_t(4), -1) *
                 ipow(sym_t(3), -1) * Poly::var(sym_y());
  disp.value = quartic_displacement(chi3, chi4, t0, t4, ff.r3_over_t3, q4, q3,
                                    y, ff.theta);
  p.steps.push_back(disp);
  return p;
}

void check_causality(const GainProgram& p) {
  std::vector<int> step_orders;
  for (const auto& st : p.steps) step_orders.push_back(st.k);
  auto is_step = [&](int k) {
    for (int s : step_orders)
      if (s == k) return true;
    return false;
  };
  for (const auto& st : p.steps) {
    for (const auto& [mono, c] : st.rhs.terms()) {
      (void)c;
      for (const auto& [s, e] : mono.f) {
        (void)e;
        Symbol y = Symbol::from_id(s);
        int ref = -1;
        switch (y.kind) {
          case SymKind::outcome_q:
            ref = y.index;
            break;
          case SymKind::outcome_y:
          case SymKind::theta:
            ref = 2;  // the rotated readout happens at the order-2 stage
            break;
          case SymKind::gain_z:
          case SymKind::ratio_g:
          case SymKind::sigma_s:
          case SymKind::loc_u:
            ref = y.index;
            break;
          case SymKind::bs_t:
          case SymKind::bs_r:
            // only adaptive splitters constrain causality; fixed ones are
            // configuration constants
            if (is_step(y.index)) ref = y.index;
            break;
          default:
            break;
        }
        if (ref >= 0 && ref <= st.k)
          throw std::logic_error("step " + std::to_string(st.k) +
                                 " references " + sym_name(s) +
                                 " measured or set at order " +
                                 std::to_string(ref));
      }
    }
  }
}

double forward_residual_error(const GainProgram& p, const OutcomeVector& o) {
  std::string scheme_name;
  if (p.scheme == "qnd")
    scheme_name = "qnd-inline";
  else if (p.scheme == "beamsplitter")
    scheme_name = "beamsplitter";
  else
    throw std::invalid_argument(
        "forward residual check supports qnd and beamsplitter programs");
  DerivedRelation rel = derive_final_relation(p.N, scheme_name);
  Poly res = residual(rel.p_out, p.N, Poly::var(sym_chi(p.N)));
  std::map<SymbolId, std::complex<double>> bind;
  bind[sym_chi(p.N)] = p.target_chi;
  for (const auto& [k, v] : o.q) bind[sym_q(k)] = v;
  for (const auto& st : p.steps) {
    if (st.kind == "coupling") bind[sym_z(st.k)] = st.value;
    if (st.kind == "ratio") {
      bind[sym_t(st.k)] = st.t;
      bind[sym_r(st.k)] = st.r;
    }
  }
  double err = 0.0;
  for (const auto& [ops, coeff] : res.by_operators()) {
    (void)ops;
    err = std::max(err, std::abs(coeff.eval(bind)));
  }
  return err;
}

}  // namespace cvnl::gains
