#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <map>
#include <random>

#include "cvnl/gains.hpp"
#include "doctest.h"

using namespace cvnl::gains;
using namespace cvnl::algebra;

namespace {

OutcomeVector outcomes_for(int N, std::mt19937& gen) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  OutcomeVector o;
  for (int k = 2; k <= N; ++k) o.q[k] = u(gen);
  return o;
}

}  // namespace

TEST_CASE("quartic tower solves the hand-written recurrences") {
  OutcomeVector o;
  o.q[4] = -0.5;
  o.q[3] = -1.0;
  o.q[2] = -0.5;
  GainProgram p = solve_qnd_gains(4, 1.0, o);

  REQUIRE(p.steps.size() == 4);
  CHECK(p.scheme == "qnd");
  CHECK(p.all_real);
  CHECK(p.first_complex_equation == -1);
  for (int i = 0; i < 4; ++i) {
    CHECK(p.steps[i].k == 4 - i);
    CHECK(p.steps[i].kind == "coupling");
    CHECK(p.steps[i].root_degree == 4 - i);
    CHECK(p.steps[i].real);
  }

  // recurrences written out independently:
  //   z4^4 = chi
  //   z3^3 = -3 q4 z4^3
  //   z2^2 = -3 q4^2 z4^2 - 2 q3 z3^2
  //   z1   = -q4^3 z4 - q3^2 z3 - q2 z2
  double z4 = 1.0;
  double z3 = std::cbrt(-3.0 * o.q[4] * z4 * z4 * z4);
  double z2 = std::sqrt(-3.0 * o.q[4] * o.q[4] * z4 * z4 -
                        2.0 * o.q[3] * z3 * z3);
  double z1 = -o.q[4] * o.q[4] * o.q[4] * z4 - o.q[3] * o.q[3] * z3 -
              o.q[2] * z2;
  CHECK(p.steps[0].value.real() == doctest::Approx(z4).epsilon(1e-14));
  CHECK(p.steps[1].value.real() == doctest::Approx(z3).epsilon(1e-14));
  CHECK(p.steps[2].value.real() == doctest::Approx(z2).epsilon(1e-14));
  CHECK(p.steps[3].value.real() == doctest::Approx(z1).epsilon(1e-14));

  // each stored rhs evaluates to value^degree at the solved bindings
  std::map<SymbolId, std::complex<double>> bind{{sym_chi(4), 1.0}};
  for (const auto& [k, v] : o.q) bind[sym_q(k)] = v;
  for (const auto& st : p.steps) bind[sym_z(st.k)] = st.value;
  for (const auto& st : p.steps) {
    std::complex<double> lhs = std::pow(st.value, st.root_degree);
    CHECK(std::abs(st.rhs.eval(bind) - lhs) < 1e-12);
  }

  CHECK_NOTHROW(check_causality(p));
}

TEST_CASE("negative even right-hand side switches to the principal complex root") {
  OutcomeVector o;
  o.q[3] = 1.0;  // makes z2^2 = -2 q3 z3^2 negative
  o.q[2] = 0.5;
  GainProgram p = solve_qnd_gains(3, 1.0, o);

  CHECK(!p.all_real);
  CHECK(p.first_complex_equation == 1);
  CHECK(p.steps[0].real);  // z3 = 1
  CHECK(!p.steps[1].real);

  std::complex<double> z2 = p.steps[1].value;
  CHECK(z2.real() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(z2.imag() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::abs(z2 * z2 - std::complex<double>(-2.0, 0.0)) < 1e-12);

  // z1 = -q3^2 z3 - q2 z2 inherits the imaginary part
  std::complex<double> z1 = p.steps[2].value;
  CHECK(z1.real() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(z1.imag() == doctest::Approx(-0.5 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("zero target solves to the all-zero program") {
  OutcomeVector o;
  o.q[2] = 0.7;
  o.q[3] = -0.3;
  GainProgram p = solve_qnd_gains(3, 0.0, o);
  CHECK(p.all_real);
  for (const auto& st : p.steps) CHECK(std::abs(st.value) == 0.0);
}

TEST_CASE("outcome vectors are validated") {
  OutcomeVector missing;
  missing.q[2] = 0.1;  // no q3
  CHECK_THROWS_AS(solve_qnd_gains(3, 1.0, missing), std::invalid_argument);

  OutcomeVector extra;
  extra.q[2] = 0.1;
  extra.q[3] = 0.2;
  extra.q[4] = 0.3;
  CHECK_THROWS_AS(solve_qnd_gains(3, 1.0, extra), std::invalid_argument);
  CHECK_THROWS_AS(solve_bs_ratios(3, 1.0, extra), std::invalid_argument);
}

TEST_CASE("solved programs cancel every sub-leading power") {
  std::mt19937 gen(417u);
  for (int N = 3; N <= 8; ++N) {
    for (int rep = 0; rep < 4; ++rep) {
      OutcomeVector o = outcomes_for(N, gen);
      GainProgram p = solve_qnd_gains(N, 0.37, o);
      CHECK(forward_residual_error(p, o) < 1e-10);
      CHECK_NOTHROW(check_causality(p));
    }
  }
  for (int N = 3; N <= 6; ++N) {
    for (int rep = 0; rep < 4; ++rep) {
      OutcomeVector o = outcomes_for(N, gen);
      GainProgram p = solve_bs_ratios(N, 0.37, o);
      CHECK(forward_residual_error(p, o) < 1e-10);
    }
  }
}

TEST_CASE("ratio steps stay on the splitter circle") {
  std::mt19937 gen(99u);
  OutcomeVector o = outcomes_for(5, gen);
  GainProgram p = solve_bs_ratios(5, 0.2, o);
  CHECK(p.scheme == "beamsplitter");
  REQUIRE(p.steps.size() == 5);
  for (const auto& st : p.steps) {
    CHECK(st.kind == "ratio");
    CHECK(std::abs(st.t * st.t + st.r * st.r - 1.0) < 1e-12);
    CHECK(st.t.real() > 0.0);
    CHECK(std::abs(st.r - st.value * st.t) < 1e-12);
  }
}

TEST_CASE("causality checker rejects a backwards reference") {
  GainProgram bad;
  bad.N = 4;
  bad.scheme = "qnd";
  GainStep st;
  st.k = 3;
  st.kind = "coupling";
  st.root_degree = 3;
  st.rhs = Poly::var(sym_q(2));  // q2 is measured after the order-3 step
  bad.steps.push_back(st);
  CHECK_THROWS_AS(check_causality(bad), std::logic_error);
  try {
    check_causality(bad);
  } catch (const std::logic_error& e) {
    CHECK(std::string(e.what()).find("q2") != std::string::npos);
  }
}

TEST_CASE("forward residual check rejects foreign schemes") {
  GainProgram p = make_quartic_program(0.1, 0.02, 0.9, 0.9, 0.3, -0.2, 0.1);
  OutcomeVector o;
  CHECK_THROWS_AS(forward_residual_error(p, o), std::invalid_argument);
}

TEST_CASE("quartic feed-forward ratio follows the signed cube root") {
  double chi3 = 0.1, chi4 = 0.02, t0 = 0.9, t4 = 0.9;
  double r4 = std::sqrt(1.0 - t4 * t4);

  QuarticFeedforward a = quartic_feedforward(chi3, chi4, t0, t4, 0.7, -0.4);
  double want = std::cbrt(-(4.0 * chi4 * r4 * r4 * r4 * 0.7) / (chi3 * t4));
  CHECK(a.r3_over_t3 == doctest::Approx(want).epsilon(1e-14));
  CHECK(a.t3 * a.t3 + a.r3 * a.r3 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a.t3 > 0.0);
  CHECK(a.r3 / a.t3 == doctest::Approx(a.r3_over_t3).epsilon(1e-13));

  // odd root: flipping the outcome flips the ratio exactly
  QuarticFeedforward b = quartic_feedforward(chi3, chi4, t0, t4, -0.7, -0.4);
  CHECK(b.r3_over_t3 == doctest::Approx(-a.r3_over_t3).epsilon(1e-14));

  // zero outcome: no third splitter, no rotation
  QuarticFeedforward c = quartic_feedforward(chi3, chi4, t0, t4, 0.0, -0.4);
  CHECK(c.r3_over_t3 == 0.0);
  CHECK(c.t3 == 1.0);
  CHECK(c.theta == 0.0);

  CHECK_THROWS_AS(quartic_feedforward(0.0, chi4, t0, t4, 0.1, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(quartic_feedforward(chi3, chi4, t0, 1.0, 0.1, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(quartic_feedforward(chi3, chi4, -0.1, t4, 0.1, 0.1),
                  std::invalid_argument);
}

TEST_CASE("displacement reduces to the carrier passthrough when adaptive terms vanish") {
  CHECK(quartic_displacement(0.1, 0.02, 0.9, 0.9, 0.0, 0.0, 0.0, 0.0, 0.0) ==
        0.0);
  // theta = 0, q3 = q4 = 0: only the rotated-readout term survives and the
  // prefactor collapses to r0/(t0 t4)
  double got = quartic_displacement(0.1, 0.02, 0.9, 0.9, 0.0, 0.0, 0.0, 0.7,
                                    0.0);
  double r0 = std::sqrt(1.0 - 0.81);
  CHECK(got == doctest::Approx(r0 / (0.9 * 0.9) * 0.7).epsilon(1e-14));
  CHECK(got == doctest::Approx(0.37669497042944083).epsilon(1e-15));

  CHECK_THROWS_AS(quartic_displacement(0.1, 0.02, 0.9, 0.9, 0.0, 0.0, 0.0,
                                       0.7, M_PI / 2 - 1e-9),
                  RotationNearPi2);
}

TEST_CASE("program polynomials agree with the closed-form values") {
  // the serialized rhs trees are built independently of the float formulas;
  // evaluating them at the solved settings must reproduce each step value
  std::mt19937 gen(2026u);
  std::uniform_real_distribution<double> uq(-1.2, 1.2);
  std::uniform_real_distribution<double> ut(0.65, 0.95);
  for (int rep = 0; rep < 24; ++rep) {
    double chi3 = 0.1, chi4 = 0.02;
    double t0 = ut(gen), t4 = ut(gen);
    double q4 = uq(gen), q3 = uq(gen), y = uq(gen);
    GainProgram p = make_quartic_program(chi3, chi4, t0, t4, q4, q3, y);
    REQUIRE(p.steps.size() == 3);
    CHECK(p.steps[0].kind == "ratio");
    CHECK(p.steps[1].kind == "phase");
    CHECK(p.steps[2].kind == "displacement");
    CHECK_NOTHROW(check_causality(p));

    double t3 = p.steps[0].t.real(), r3 = p.steps[0].r.real();
    double theta = p.steps[1].value.real();
    std::map<SymbolId, std::complex<double>> b{
        {sym_chi(3), chi3},
        {sym_chi(4), chi4},
        {sym_t(0), t0},
        {sym_r(0), std::sqrt(1.0 - t0 * t0)},
        {sym_t(3), t3},
        {sym_r(3), r3},
        {sym_t(4), t4},
        {sym_r(4), std::sqrt(1.0 - t4 * t4)},
        {sym_q(3), q3},
        {sym_q(4), q4},
        {sym_theta(), std::tan(theta)},
        {sym_y(), y / std::cos(theta)}};

    double ratio = p.steps[0].value.real();
    CHECK(p.steps[0].rhs.eval(b).real() ==
          doctest::Approx(ratio * ratio * ratio).epsilon(1e-12));
    CHECK(std::atan(p.steps[1].rhs.eval(b).real()) ==
          doctest::Approx(theta).epsilon(1e-12));
    CHECK(p.steps[2].rhs.eval(b).real() ==
          doctest::Approx(p.steps[2].value.real()).epsilon(1e-11));
  }
}
