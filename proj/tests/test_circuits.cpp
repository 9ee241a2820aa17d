#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <vector>

#include "cvnl/circuits.hpp"
#include "cvnl/kernels.hpp"
#include "cvnl/metrics.hpp"
#include "doctest.h"

using namespace cvnl;
using namespace cvnl::circuits;

namespace {

sim::ModeState displace_x(const sim::ModeState& s, double d) {
  return sim::phase_rotate(sim::displace_p(sim::phase_rotate(s, -M_PI / 2), d),
                           M_PI / 2);
}

bool records_equal(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  return a.index == b.index && a.outcomes == b.outcomes && a.t3 == b.t3 &&
         a.r3 == b.r3 && a.theta == b.theta && a.chi2 == b.chi2 &&
         a.p_disp == b.p_disp && a.fidelity == b.fidelity &&
         a.out_mean_x == b.out_mean_x && a.out_var_x == b.out_var_x &&
         a.out_mean_p == b.out_mean_p && a.out_var_p == b.out_var_p &&
         a.resampled == b.resampled;
}

}  // namespace

TEST_CASE("resolve fills defaults and derives the coupling") {
  CircuitConfig cfg;
  cfg.gate = "cubic";
  cfg.chi = 0.05;
  CircuitConfig c = resolve(cfg);
  REQUIRE(c.ancillas.size() == 1);
  CHECK(c.ancillas[0].k == 3);
  CHECK(c.ancillas[0].chi_k == 0.05);
  CHECK(c.z == doctest::Approx(-1.0).epsilon(1e-14));

  cfg.ancillas = {sim::AncillaSpec{3, 0.4, 10.0}};
  CHECK(resolve(cfg).z == doctest::Approx(-std::cbrt(0.125)).epsilon(1e-14));

  CircuitConfig q;
  q.gate = "quartic";
  q.chi = 0.02;
  CircuitConfig qr = resolve(q);
  REQUIRE(qr.ancillas.size() == 2);
  CHECK(qr.ancillas[0].k == 4);
  CHECK(qr.ancillas[0].chi_k == 0.02);
  CHECK(qr.ancillas[1].k == 3);
  CHECK(qr.ancillas[1].chi_k == 0.1);
}

TEST_CASE("resolve rejects contradictions") {
  CircuitConfig cfg;
  cfg.gate = "cubic";

  CircuitConfig bad = cfg;
  bad.trajectories = -1;
  CHECK_THROWS_AS(resolve(bad), std::invalid_argument);

  bad = cfg;
  bad.sampling = "latin";
  CHECK_THROWS_AS(resolve(bad), std::invalid_argument);

  bad = cfg;
  bad.gate = "quintic";
  CHECK_THROWS_AS(resolve(bad), std::invalid_argument);

  bad = cfg;
  bad.ancillas = {sim::AncillaSpec{4, 0.05, 10.0}};
  CHECK_THROWS_AS(resolve(bad), std::invalid_argument);

  bad = cfg;  // stated coupling fights the target
  bad.z = 0.5;
  CHECK_THROWS_AS(resolve(bad), std::invalid_argument);

  bad = cfg;  // zero resource strength cannot realize a nonzero target
  bad.ancillas = {sim::AncillaSpec{3, 0.0, 10.0}};
  CHECK_THROWS_AS(resolve(bad), std::invalid_argument);

  CircuitConfig q;
  q.gate = "quartic";

  bad = q;
  bad.t0 = 1.0;
  CHECK_THROWS_AS(resolve(bad), std::invalid_argument);

  bad = q;
  bad.carrier.k = 3;
  CHECK_THROWS_AS(resolve(bad), std::invalid_argument);

  bad = q;  // resources must come highest order first
  bad.ancillas = {sim::AncillaSpec{3, 0.1, 10.0},
                  sim::AncillaSpec{4, 0.02, 10.0}};
  CHECK_THROWS_AS(resolve(bad), std::invalid_argument);

  bad = q;
  bad.ancillas = {sim::AncillaSpec{4, 0.02, 10.0},
                  sim::AncillaSpec{3, 0.0, 10.0}};
  CHECK_THROWS_AS(resolve(bad), std::invalid_argument);
}

TEST_CASE("effective quartic strength follows the splitter prefactors") {
  double t0 = 0.9, t4 = 0.8, chi4 = 0.05;
  double r0s = 1.0 - t0 * t0, r4s = 1.0 - t4 * t4;
  double want = -chi4 * r0s * r0s * r4s * r4s /
                (t0 * t0 * t0 * t0 * t4 * t4 * t4 * t4);
  CHECK(quartic_oracle_chi(chi4, t0, t4) ==
        doctest::Approx(want).epsilon(1e-14));
  CHECK(quartic_oracle_chi(chi4, t0, t4) < 0.0);
}

TEST_CASE("comparison oracle is the pure nonlinear phase") {
  sim::ModeState v = sim::make_vacuum(sim::kDefaultModeGrid);
  sim::ModeState a = oracle(v, 0.3, 3);
  sim::ModeState b = sim::nonlinear_phase(v, 0.3, 3);
  CHECK(std::memcmp(a.amp.data(), b.amp.data(),
                    a.amp.size() * sizeof(sim::cplx)) == 0);
}

TEST_CASE("zero-strength gate passes the input through untouched") {
  CircuitConfig cfg;
  cfg.gate = "cubic";
  cfg.chi = 0.0;
  cfg.trajectories = 6;
  RunResult r = run_cubic(cfg);
  CHECK(r.config.z == 0.0);
  for (const auto& rec : r.records)
    CHECK(rec.fidelity >= 1.0 - 1e-12);
}

TEST_CASE("centered outcome leaves only the resource noise") {
  auto infid = [](double db) {
    CircuitConfig cfg;
    cfg.gate = "cubic";
    cfg.chi = 0.05;
    cfg.squeezing_db = db;
    cfg.trajectories = 1;
    cfg.forced_outcomes = {0.0};
    return 1.0 - run_cubic(cfg).mean_fidelity;
  };
  double e10 = infid(10.0);
  double e15 = infid(15.0);
  CHECK(e10 < 2e-3);
  CHECK(e15 < e10 / 5.0);  // error tracks the squeezed variance
}

TEST_CASE("two-grid reference and analytic resource path coincide") {
  CircuitConfig cfg;
  cfg.gate = "cubic";
  cfg.chi = 0.05;
  cfg.squeezing_db = 10.0;
  sim::ModeState v = sim::make_vacuum(cfg.grid);
  for (int i = 0; i < 3; ++i) {
    rng::SplitMix64 gen = rng::substream(5u, i);
    TrajectoryRecord jr = cubic_joint_reference(cfg, v, gen);
    REQUIRE(jr.state.has_value());

    CircuitConfig c2 = cfg;
    c2.trajectories = 1;
    c2.keep_states = true;
    c2.forced_outcomes = {jr.outcomes[0]};
    RunResult ar = run_cubic(c2, v);
    REQUIRE(ar.records[0].state.has_value());

    CHECK(metrics::fidelity(*jr.state, *ar.records[0].state) >= 1.0 - 1e-12);
    CHECK(std::abs(jr.fidelity - ar.records[0].fidelity) < 1e-12);
    CHECK(jr.chi2 == ar.records[0].chi2);
    CHECK(jr.p_disp == ar.records[0].p_disp);
  }
}

TEST_CASE("cubic fidelity climbs with resource squeezing") {
  auto mean_f = [](double db) {
    CircuitConfig cfg;
    cfg.gate = "cubic";
    cfg.chi = 0.05;
    cfg.squeezing_db = db;
    cfg.trajectories = 120;
    cfg.seed = 3u;
    return run_cubic(cfg).mean_fidelity;
  };
  double f5 = mean_f(5.0), f15 = mean_f(15.0), f25 = mean_f(25.0);
  CHECK(f5 > 0.90);
  CHECK(f5 < 0.96);
  CHECK(f15 > f5 + 0.02);
  CHECK(f25 > f15 + 0.002);
  CHECK(f25 > 0.995);
}

TEST_CASE("output x variance carries exactly the tap noise") {
  // the carrier tap happens after the input pre-squeeze, so the excess of
  // E[var_x] + Var[mean_x] over the vacuum half is r0^2 Var(x_carrier)
  CircuitConfig cfg;
  cfg.gate = "quartic";
  cfg.trajectories = 150;
  cfg.seed = 11u;
  RunResult r = run_quartic(cfg);
  CHECK(r.mean_fidelity > 0.95);

  double mean_mx = 0.0;
  for (const auto& rec : r.records) mean_mx += rec.out_mean_x;
  mean_mx /= r.records.size();
  double var_mx = 0.0;
  for (const auto& rec : r.records)
    var_mx += (rec.out_mean_x - mean_mx) * (rec.out_mean_x - mean_mx);
  var_mx /= r.records.size();

  double excess = r.mean_var_x + var_mx - 0.5;
  double pred = (1.0 - cfg.t0 * cfg.t0) * 0.5 * std::pow(10.0, -1.0);
  CHECK(excess / pred > 0.85);
  CHECK(excess / pred < 1.15);
}

TEST_CASE("cascade phase has the derived sign and strength") {
  CircuitConfig cfg;
  cfg.gate = "quartic";
  cfg.t0 = 0.7;
  cfg.t4 = 0.7;
  cfg.ancillas = {sim::AncillaSpec{4, 0.015, 25.0},
                  sim::AncillaSpec{3, 0.1, 25.0}};
  cfg.carrier = {0, 0.0, 25.0};
  cfg.carrier_grid = {512, 8.0};  // the strong tap shears wider than L = 4
  cfg.trajectories = 1;
  cfg.keep_states = true;
  cfg.forced_outcomes = {0.8, -0.5, 0.3};

  sim::ModeState in = displace_x(sim::make_vacuum(cfg.grid), 1.5);
  RunResult r = run_quartic(cfg, in);
  const TrajectoryRecord& rec = r.records[0];
  REQUIRE(rec.state.has_value());
  REQUIRE(rec.outcomes.size() == 3);
  CHECK(rec.outcomes[0] == 0.8);
  CHECK(rec.outcomes[1] == -0.5);
  CHECK(rec.t3 > 0.0);
  CHECK(rec.t3 < 1.0);
  CHECK(rec.theta != 0.0);
  CHECK(rec.n_fine > 0);

  double chi_o = quartic_oracle_chi(0.015, 0.7, 0.7);
  CHECK(r.oracle_chi == chi_o);
  double fplus = rec.fidelity;
  double fminus = metrics::fidelity(*rec.state, oracle(in, -chi_o, 4));
  CHECK(fplus > 0.995);           // realized strength matches the oracle
  CHECK(fplus - fminus > 0.1);    // and the sign is resolved decisively
}

TEST_CASE("runs are reproducible across repeats and thread counts") {
  CircuitConfig cfg;
  cfg.gate = "cubic";
  cfg.chi = 0.05;
  cfg.trajectories = 40;
  cfg.seed = 7u;

  int old_threads = kernels::max_threads();
  kernels::set_max_threads(1);
  RunResult a = run_cubic(cfg);
  RunResult b = run_cubic(cfg);
  kernels::set_max_threads(4);
  RunResult c = run_cubic(cfg);
  kernels::set_max_threads(old_threads);

  REQUIRE(a.records.size() == b.records.size());
  REQUIRE(a.records.size() == c.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(records_equal(a.records[i], b.records[i]));
    CHECK(records_equal(a.records[i], c.records[i]));
  }
  CHECK(a.mean_fidelity == c.mean_fidelity);
  CHECK(a.std_fidelity == c.std_fidelity);
}

TEST_CASE("iid sampling changes the draw but stays reproducible") {
  CircuitConfig cfg;
  cfg.gate = "cubic";
  cfg.chi = 0.05;
  cfg.trajectories = 16;
  cfg.seed = 7u;
  cfg.sampling = "iid";
  RunResult a = run_cubic(cfg);
  RunResult b = run_cubic(cfg);
  for (std::size_t i = 0; i < a.records.size(); ++i)
    CHECK(records_equal(a.records[i], b.records[i]));

  cfg.sampling = "stratified";
  RunResult c = run_cubic(cfg);
  bool any_differs = false;
  for (std::size_t i = 0; i < a.records.size(); ++i)
    if (a.records[i].outcomes != c.records[i].outcomes) any_differs = true;
  CHECK(any_differs);
}

TEST_CASE("an empty run reports no statistics") {
  CircuitConfig cfg;
  cfg.gate = "cubic";
  cfg.trajectories = 0;
  RunResult r = run_cubic(cfg);
  CHECK(r.records.empty());
  CHECK(std::isnan(r.mean_fidelity));
}

TEST_CASE("input grid must match the configured grid") {
  CircuitConfig cfg;
  cfg.gate = "cubic";
  sim::ModeState wrong = sim::make_vacuum(sim::GridSpec{256, 8.0});
  CHECK_THROWS_AS(run_cubic(cfg, wrong), std::invalid_argument);
}

TEST_CASE("symbolic certification wrapper reports full passes") {
  SymbolicReport a = symbolic_run(3, "qnd-inline");
  CHECK(a.pass);
  CHECK(a.residual_zero);
  CHECK(a.forward_residual < 1e-10);
  CHECK(a.program.steps.size() == 3);
  CHECK(a.final_relation.find("x_in") != std::string::npos);

  gains::OutcomeVector o;
  o.q[2] = 0.3;
  o.q[3] = -0.2;
  SymbolicReport b = symbolic_run(3, "qnd-inline", 0.7, &o);
  CHECK(b.pass);
  CHECK(b.forward_residual < 1e-10);

  SymbolicReport c = symbolic_run(5, "beamsplitter");
  CHECK(c.pass);
  CHECK(c.residual_zero);
  REQUIRE(!c.structural_ok.empty());
  for (bool ok : c.structural_ok) CHECK(ok);

  SymbolicReport d = symbolic_run(4, "quartic-optical");
  CHECK(d.pass);
  CHECK(d.quartic_term_match);
  CHECK(d.cube_root_certified);
  CHECK(d.program.steps.size() == 3);

  SymbolicReport e = symbolic_run(6, "qnd-measurement-induced");
  CHECK(e.pass);

  CHECK_THROWS(symbolic_run(9, "qnd-inline"));
  CHECK_THROWS(symbolic_run(7, "beamsplitter"));
  CHECK_THROWS(symbolic_run(4, "bogus"));
}
