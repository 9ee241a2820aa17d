#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <complex>
#include <map>

#include "cvnl/frame.hpp"
#include "doctest.h"
#include "support/reference_relation.hpp"

using namespace cvnl::algebra;
using cvnl::testsupport::qnd_chain_p_out;

namespace {

Poly pvar(SymbolId s, int e = 1) { return Poly::var(s, e); }

// circle relations r_k^2 -> 1 - t_k^2 for the indices used in a test
RewriteRule circle(int k) {
  return {Monomial::var(sym_r(k), 2), Poly(1) - pvar(sym_t(k)) * pvar(sym_t(k))};
}

}  // namespace

TEST_CASE("rational coefficient arithmetic is exact") {
  Poly third = Poly(CRat(Rat(1) / 3)) * pvar(sym_x_in());
  Poly x = third + third + third;
  CHECK(x == pvar(sym_x_in()));
  CHECK((x - pvar(sym_x_in())).is_zero());

  // (x + q3)^2 expands with exact binomials
  Poly sq = (pvar(sym_x_in()) + pvar(sym_q(3))).pow(2);
  Poly manual;
  manual.add_term(CRat(1), Monomial::var(sym_x_in(), 2));
  manual.add_term(CRat(2), Monomial::var(sym_x_in()) * Monomial::var(sym_q(3)));
  manual.add_term(CRat(1), Monomial::var(sym_q(3), 2));
  CHECK(sq == manual);

  // Laurent multiply on classical symbols round-trips
  Poly p = pvar(sym_t(4), 3).mul_mono(CRat(1), Monomial::var(sym_t(4), -3));
  CHECK(p == Poly(1));
}

TEST_CASE("complex rational coefficients multiply exactly") {
  CRat i(Rat(0), Rat(1));
  CHECK(i * i == CRat(-1));
  Poly p = Poly(i) * pvar(sym_x_in());
  CHECK((p * p).terms().begin()->second == CRat(-1));
}

TEST_CASE("canonical text form is stable") {
  Poly p = pvar(sym_z(3), 3) * pvar(sym_x_in(), 2) + pvar(sym_p_in()) +
           Poly(CRat(Rat(1) / 2)) * pvar(sym_q(3), 2) * pvar(sym_z(3));
  CHECK(p.str() == "1*x_in^2*z3^3 + 1*p_in + 1/2*q3^2*z3");
  CHECK(Poly().str() == "0");
}

TEST_CASE("operator symbols reject negative exponents") {
  Monomial bad;
  bad.f = {{sym_x_in(), -1}};
  CHECK_THROWS(bad.validate());
  // classical Laurent exponents are fine
  Monomial ok;
  ok.f = {{sym_t(4), -2}};
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("substitution expands powers exactly") {
  Poly p = pvar(sym_x_anc(3), 2);
  Poly rep = pvar(sym_q(3)) + pvar(sym_z(3)) * pvar(sym_x_in());
  Poly got = p.substitute(sym_x_anc(3), rep);
  CHECK(got == rep.pow(2));

  // substitute_mono handles inverse powers
  Poly q = pvar(sym_t(4), -2);
  Poly t2 = q.substitute_mono(sym_t(4), CRat(2), Monomial::one());
  CHECK(t2 == Poly(CRat(Rat(1) / 4)));
}

TEST_CASE("rewrite fixpoint certifies ideal membership") {
  // (r4^2 + t4^2)^2 - 1 lies in the ideal of r4^2 -> 1 - t4^2
  Poly p = (pvar(sym_r(4), 2) + pvar(sym_t(4), 2)).pow(2) - Poly(1);
  CHECK(rewrite_fixpoint(p, {circle(4)}).is_zero());
}

TEST_CASE("eval binds numerics into exact polynomials") {
  Poly p = pvar(sym_z(3), 3) * pvar(sym_x_in()) + pvar(sym_q(3));
  std::map<SymbolId, std::complex<double>> bind{
      {sym_z(3), {2.0, 0.0}}, {sym_x_in(), {0.5, 0.0}}, {sym_q(3), {-1.0, 0.0}}};
  CHECK(p.eval(bind).real() == doctest::Approx(8.0 * 0.5 - 1.0));
}

TEST_CASE("qnd coupling transforms only the two stated quadratures") {
  HeisenbergFrame f = add_ancilla(add_signal({}), 3);
  HeisenbergFrame g = qnd_apply(f, kSignalMode, 3, pvar(sym_z(3)));

  CHECK(g.mode(kSignalMode).first == pvar(sym_x_in()));
  CHECK(g.mode(kSignalMode).second ==
        pvar(sym_p_in()) + pvar(sym_z(3)) * pvar(sym_p_anc(3)));
  CHECK(g.mode(3).first ==
        pvar(sym_x_anc(3)) - pvar(sym_z(3)) * pvar(sym_x_in()));
  CHECK(g.mode(3).second == pvar(sym_p_anc(3)));

  // zero gain is the identity
  HeisenbergFrame h = qnd_apply(f, kSignalMode, 3, Poly());
  CHECK(h.mode(kSignalMode).second == f.mode(kSignalMode).second);
  CHECK(h.mode(3).first == f.mode(3).first);
}

TEST_CASE("successive qnd couplings accumulate ancilla momenta") {
  HeisenbergFrame f = add_ancilla(add_ancilla(add_signal({}), 2), 3);
  f = qnd_apply(f, kSignalMode, 2, pvar(sym_z(2)));
  f = qnd_apply(f, kSignalMode, 3, pvar(sym_z(3)));
  Poly want = pvar(sym_p_in()) + pvar(sym_z(2)) * pvar(sym_p_anc(2)) +
              pvar(sym_z(3)) * pvar(sym_p_anc(3));
  CHECK(f.mode(kSignalMode).second == want);
}

TEST_CASE("beam splitter orientation and involution") {
  HeisenbergFrame f = add_ancilla(add_ancilla({}, 0), 4);

  // slot 1 takes t*own + r*other
  HeisenbergFrame g = bs_apply(f, 0, 4, pvar(sym_t(4)), pvar(sym_r(4)));
  CHECK(g.mode(0).first ==
        pvar(sym_t(4)) * pvar(sym_x_anc(0)) + pvar(sym_r(4)) * pvar(sym_x_anc(4)));
  CHECK(g.mode(4).first ==
        pvar(sym_t(4)) * pvar(sym_x_anc(4)) - pvar(sym_r(4)) * pvar(sym_x_anc(0)));

  // (1, 0) is the identity
  HeisenbergFrame id = bs_apply(f, 0, 4, Poly(1), Poly());
  CHECK(id.mode(0).first == f.mode(0).first);
  CHECK(id.mode(4).second == f.mode(4).second);

  // (0, 1) swaps; applying it twice flips both signs
  HeisenbergFrame sw = bs_apply(bs_apply(f, 0, 4, Poly(), Poly(1)), 0, 4,
                                Poly(), Poly(1));
  CHECK(sw.mode(0).first == -pvar(sym_x_anc(0)));
  CHECK(sw.mode(0).second == -pvar(sym_p_anc(0)));
  CHECK(sw.mode(4).first == -pvar(sym_x_anc(4)));
}

TEST_CASE("gaussian correction divides by the squeeze and displaces") {
  HeisenbergFrame f = add_signal({});
  Poly half(CRat(Rat(1) / 2));
  HeisenbergFrame g = gaussian_correct(f, kSignalMode, half, pvar(sym_q(2)),
                                       pvar(sym_q(3)));
  CHECK(g.mode(kSignalMode).first == CRat(2) * pvar(sym_x_in()) + pvar(sym_q(3)));
  CHECK(g.mode(kSignalMode).second == CRat(2) * pvar(sym_p_in()) + pvar(sym_q(2)));

  // squeeze s then 1/s composes to the identity
  HeisenbergFrame h = gaussian_correct(f, kSignalMode, half, Poly());
  h = gaussian_correct(h, kSignalMode, Poly(2), Poly());
  CHECK(h.mode(kSignalMode).first == pvar(sym_x_in()));
  CHECK(h.mode(kSignalMode).second == pvar(sym_p_in()));

  CHECK_THROWS(gaussian_correct(f, kSignalMode, Poly(), Poly()));
}

TEST_CASE("position homodyne records the invertible substitution") {
  HeisenbergFrame f = add_ancilla(add_signal({}), 3);
  f = qnd_apply(f, kSignalMode, 3, pvar(sym_z(3)));
  f = measure_x(f, 3, sym_q(3));

  CHECK(!f.live(3));
  const Measurement* m = f.measurement_for(3);
  REQUIRE(m != nullptr);
  CHECK(m->measured_expr ==
        pvar(sym_x_anc(3)) - pvar(sym_z(3)) * pvar(sym_x_in()));
  CHECK(m->inversion == pvar(sym_q(3)) + pvar(sym_z(3)) * pvar(sym_x_in()));

  // decoupled ancilla: the readout is the bare operator
  HeisenbergFrame g = measure_x(add_ancilla(add_signal({}), 2), 2, sym_q(2));
  CHECK(g.measurement_for(2)->inversion == pvar(sym_q(2)));

  CHECK_THROWS(measure_x(f, 3, sym_q(3)));  // already retired
}

TEST_CASE("nonlinearity substitution expands the inverted readout") {
  HeisenbergFrame f = add_ancilla(add_signal({}), 3);
  f = qnd_apply(f, kSignalMode, 3, pvar(sym_z(3)));
  f = measure_x(f, 3, sym_q(3));
  f = substitute_ancilla_nonlinearity(f, 3, pvar(sym_chi(3)));

  Poly inner = pvar(sym_q(3)) + pvar(sym_z(3)) * pvar(sym_x_in());
  Poly want = pvar(sym_p_in()) +
              pvar(sym_z(3)) * pvar(sym_chi(3)) * inner.pow(2);
  CHECK(f.mode(kSignalMode).second == want);
}

TEST_CASE("order-1 channel needs no measurement") {
  HeisenbergFrame f = add_p_channel(add_signal({}), kSignalMode, 1,
                                    pvar(sym_z(1)));
  f = substitute_ancilla_nonlinearity(f, 1);
  CHECK(f.mode(kSignalMode).second == pvar(sym_p_in()) + pvar(sym_z(1)));
}

TEST_CASE("linear-part brackets stay canonical through couplings") {
  HeisenbergFrame f = add_ancilla(add_signal({}), 3);
  f = qnd_apply(f, kSignalMode, 3, pvar(sym_z(3)));
  // rational beam splitter 3/5, 4/5 keeps the bracket exactly 1
  f = bs_apply(f, kSignalMode, 3, Poly(CRat(Rat(3) / 5)),
               Poly(CRat(Rat(4) / 5)));

  CHECK(frame_poisson_bracket(f, kSignalMode, kSignalMode) == Poly(1));
  CHECK(frame_poisson_bracket(f, 3, 3) == Poly(1));
  CHECK(frame_poisson_bracket(f, kSignalMode, 3).is_zero());

  // the correction map is deliberately a pure rescale, bracket squeeze^-2
  HeisenbergFrame g = gaussian_correct(add_signal({}), kSignalMode, Poly(2),
                                       Poly());
  CHECK(frame_poisson_bracket(g, kSignalMode, kSignalMode) ==
        Poly(CRat(Rat(1) / 4)));
}

TEST_CASE("derived inline relation equals the binomial chain form") {
  for (int N = 3; N <= kOrderMax; ++N) {
    DerivedRelation rel = derive_final_relation(N, "qnd-inline");
    CHECK(rel.x_out == pvar(sym_x_in()));
    CHECK(rel.p_out == qnd_chain_p_out(N));
  }
}

TEST_CASE("measurement-induced variant reduces to the inline relation") {
  for (int N = 3; N <= kOrderMax; ++N) {
    DerivedRelation a = derive_final_relation(N, "qnd-inline");
    DerivedRelation b = derive_final_relation(N, "qnd-measurement-induced");
    CHECK(a.p_out == b.p_out);
    CHECK(b.x_out == pvar(sym_x_in()));
  }
}

TEST_CASE("golden text of the order-3 relation") {
  DerivedRelation rel = derive_final_relation(3, "qnd-inline");
  CHECK(rel.p_out.str() ==
        "1*x_in^2*z3^3 + 2*x_in*q3*z3^2 + 1*x_in*z2^2 + 1*p_in + 1*q2*z2 + "
        "1*q3^2*z3 + 1*z1");
}

TEST_CASE("top-power coefficient is the pure gain power") {
  DerivedRelation rel = derive_final_relation(4, "qnd-inline");
  Poly c = rel.p_out.coeff_of_operators(Monomial::var(sym_x_in(), 3));
  CHECK(c == pvar(sym_z(4), 4));
}

TEST_CASE("order range is enforced") {
  CHECK_THROWS(derive_final_relation(2, "qnd-inline"));
  CHECK_THROWS(derive_final_relation(kOrderMax + 1, "qnd-inline"));
  CHECK_THROWS(derive_final_relation(4, "no-such-scheme"));
}

TEST_CASE("solved towers reduce every residual to the zero polynomial") {
  for (int N = 3; N <= kOrderMax; ++N) {
    SchemeCertificate a = certify_scheme(N, "qnd-inline");
    CHECK(a.residual_zero);
    CHECK(a.reduced_residual == "0");
    SchemeCertificate b = certify_scheme(N, "qnd-measurement-induced");
    CHECK(b.residual_zero);
  }
  for (int N = 3; N <= 6; ++N) {
    SchemeCertificate c = certify_scheme(N, "beamsplitter");
    CHECK(c.residual_zero);
    REQUIRE(!c.structural_ok.empty());
    for (bool ok : c.structural_ok) CHECK(ok);
  }
}

TEST_CASE("residual exposes missing and perturbed gains") {
  // no gains at all: the full target coefficient survives
  Poly bare = pvar(sym_p_in());
  Poly res = residual(bare, 4, pvar(sym_chi(4)));
  CHECK(res == -(pvar(sym_chi(4)) * pvar(sym_x_in(), 3)));

  // perturbing the top gain leaks into the quadratic coefficient at first
  // order in the perturbation
  Poly eps = pvar(sym_aux(1));
  Poly p_out = qnd_chain_p_out(3).substitute(sym_z(3),
                                             pvar(sym_z(3)) + eps);
  Poly reduced = rewrite_fixpoint(residual(p_out, 3, pvar(sym_chi(3))),
                                  qnd_tower_rules(3));
  Poly c2 = reduced.coeff_of_operators(Monomial::var(sym_x_in(), 2));
  Poly want = CRat(3) * pvar(sym_z(3), 2) * eps +
              CRat(3) * pvar(sym_z(3)) * eps.pow(2) + eps.pow(3);
  CHECK(c2 == want);
}

TEST_CASE("beam splitter tap chain reproduces the tapped readout") {
  // signal tapped into the carrier, carrier split into the order-4 resource,
  // resource port measured
  HeisenbergFrame f = add_ancilla(add_ancilla(add_signal({}), 0), 4);
  f = bs_apply(f, kSignalMode, 0, pvar(sym_t(0)), -pvar(sym_r(0)));
  f = bs_apply(f, 0, 4, pvar(sym_t(4)), pvar(sym_r(4)));
  f = measure_x(f, 4, sym_q(4));

  Poly want = -(pvar(sym_r(0)) * pvar(sym_r(4)) * pvar(sym_x_in())) -
              pvar(sym_t(0)) * pvar(sym_r(4)) * pvar(sym_x_anc(0)) +
              pvar(sym_t(4)) * pvar(sym_x_anc(4));
  CHECK(f.measurement_for(4)->measured_expr == want);
  // the signal keeps the tapped form
  CHECK(f.mode(kSignalMode).first ==
        pvar(sym_t(0)) * pvar(sym_x_in()) -
            pvar(sym_r(0)) * pvar(sym_x_anc(0)));
}

TEST_CASE("ratio localization rewrites splitter variables") {
  CHECK(bs_localize(pvar(sym_r(3)) * pvar(sym_t(3), -1), 4) ==
        pvar(sym_g(3)));
  CHECK(bs_localize(pvar(sym_t(3), -2), 4) ==
        pvar(sym_g(3), 2) + Poly(1));
}

TEST_CASE("quartic cascade derivation matches the target operator forms") {
  QuarticDerivation qd = derive_quartic_optical();
  CHECK(qd.x_exact);
  CHECK(qd.p_exact);
  CHECK(qd.cube_root_certified);
  CHECK(qd.x_diff.is_zero());
  CHECK(qd.p_diff.is_zero());

  CHECK(qd.x_derived ==
        pvar(sym_t(0)) * pvar(sym_x_in()) -
            pvar(sym_r(0)) * pvar(sym_x_anc(0)));

  // leading noise prefactors of the two nonlinear resources
  Poly pref4 = pvar(sym_r(0)) * pvar(sym_r(4)) * pvar(sym_t(0), -1) *
               pvar(sym_t(4), -1);
  Poly pref3 = pvar(sym_r(0)) * pvar(sym_g(3)) * pvar(sym_t(0), -1) *
               pvar(sym_t(4), -1);
  CHECK(qd.p_derived.coeff_of_operators(Monomial::var(sym_p_anc(4))) == pref4);
  CHECK(qd.p_derived.coeff_of_operators(Monomial::var(sym_p_anc(3))) == pref3);

  // the input momentum prefactor collapses to 1/t0 on the circle
  Poly cp = qd.p_derived.coeff_of_operators(Monomial::var(sym_p_in()));
  CHECK(rewrite_fixpoint(cp, {circle(0)}) == pvar(sym_t(0), -1));
}
