#include "cvnl/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "cvnl/fftw_wrap.hpp"
#include "cvnl/frame.hpp"
#include "cvnl/kernels.hpp"
#include "cvnl/metrics.hpp"

namespace cvnl::circuits {

namespace {

using sim::cplx;

// outcome-dependent guard trip; the trajectory is resampled
struct Retry {};

struct SampledBin {
  double value = 0.0;
  int bin = -1;
};

// Inverse-CDF draw from tabulated bin weights (centers x0 + i dx) with an
// intra-bin linear offset; same semantics as the grid homodyne.
SampledBin sample_density(const std::vector<double>& w, double x0, double dx,
                          double u) {
  double tot = 0.0;
  for (double v : w) tot += v;
  if (!(tot > 0.0) || !std::isfinite(tot))
    throw std::runtime_error("degenerate outcome density");
  double target = u * tot, cum = 0.0, frac = 0.5;
  int idx = -1;
  for (int i = 0; i < (int)w.size(); ++i) {
    if (cum + w[i] >= target && w[i] > 0.0) {
      idx = i;
      frac = (target - cum) / w[i];
      break;
    }
    cum += w[i];
  }
  if (idx < 0) {  // rounding spill past the last massive bin
    for (int i = (int)w.size() - 1; i >= 0; --i)
      if (w[i] > 0.0) {
        idx = i;
        break;
      }
  }
  return {x0 + idx * dx + (frac - 0.5) * dx, idx};
}

double binom(int n, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
  return v;
}

// Analytic carrier phase, a real quartic in the frame coordinate. Collapses
// fold their steep nonlinear phases in here so the grid only ever carries the
// smooth envelope.
struct PhasePoly {
  double c[5] = {0, 0, 0, 0, 0};
  void scale_arg(double t) {
    double f = 1.0;
    for (int i = 0; i <= 4; ++i) {
      c[i] *= f;
      f *= t;
    }
  }
  void add_shifted_power(double chi, double r, double q, int k) {
    for (int j = 0; j <= k; ++j)
      c[j] += chi * binom(k, j) * std::pow(r, j) * std::pow(q, k - j);
  }
  double eval(double xi) const {
    return (((c[4] * xi + c[3]) * xi + c[2]) * xi + c[1]) * xi + c[0];
  }
  double deriv(double xi) const {
    return ((4.0 * c[4] * xi + 3.0 * c[3]) * xi + 2.0 * c[2]) * xi + c[1];
  }
};

// trig interpolation kernel for even n
double dirichlet(double s, int n) {
  double w = std::remainder(s, (double)n);
  if (std::abs(w) < 1e-12) return 1.0;
  return std::sin(M_PI * w) / (n * std::tan(M_PI * w / n));
}

struct ResourceSpec {
  int k = 0;
  double chi = 0.0;
  double sigma2 = 0.5;  // x variance of the Gaussian envelope
};

ResourceSpec resource_for(const sim::AncillaSpec& a) {
  double shrink = std::pow(10.0, -a.squeezing_db / 10.0);
  return {a.k, a.chi_k, a.k == 0 ? 0.5 * shrink : 0.5 / shrink};
}

void normalize_mode(sim::ModeState& s) {
  double n = sim::norm(s);
  if (!(n > 1e-9)) throw std::runtime_error("collapse annihilated the state");
  kernels::scale(s.amp.data(), (int)s.amp.size(), 1.0 / n);
}

void fill_moments(TrajectoryRecord& rec, const sim::ModeState& s) {
  auto m = sim::mode_moments(s);
  rec.out_mean_x = m.mean_x;
  rec.out_var_x = m.var_x;
  rec.out_mean_p = m.mean_p;
  rec.out_var_p = m.var_p;
}

// ---------------------------------------------------------------- cubic gate

struct CubicPlan {
  CircuitConfig cfg;
  ResourceSpec res;
  sim::ModeState oracle_state;
  double net_c3 = 0.0;  // z^3 chi3, the surviving slice phase (= -chi)
};

TrajectoryRecord cubic_one(const CubicPlan& plan, const sim::ModeState& input,
                           double u_first, const double* forced) {
  const auto& g = input.grid;
  const double z = plan.cfg.z, sig2 = plan.res.sigma2;
  TrajectoryRecord rec;

  double q;
  if (forced) {
    q = *forced;
  } else {
    // exact readout density P(q) = sum_j |psi_j|^2 den(q + z x_j)
    std::vector<double> w(g.n);
    for (int j = 0; j < g.n; ++j) w[j] = std::norm(input.amp[j]);
    auto mm = sim::mode_moments(input);
    double sq = std::sqrt(sig2 + z * z * mm.var_x);
    const int nq = 4096;
    double lo = -z * mm.mean_x - 6.0 * sq, dq = 12.0 * sq / nq;
    std::vector<double> P(nq);
    for (int i = 0; i < nq; ++i) {
      double qi = lo + (i + 0.5) * dq, acc = 0.0;
      for (int j = 0; j < g.n; ++j) {
        double u = qi + z * g.x(j);
        acc += w[j] * std::exp(-u * u / (2.0 * sig2));
      }
      P[i] = acc;
    }
    q = sample_density(P, lo + 0.5 * dq, dq, u_first).value;
  }
  rec.outcomes = {q};

  // conditional slice with the correction unitaries folded in analytically:
  // the x^2 and x phases of chi3 (q + z x)^3 cancel against them exactly,
  // leaving the envelope times the target cubic
  sim::ModeState out = input;
  for (int j = 0; j < g.n; ++j) {
    double u = q + z * g.x(j);
    out.amp[j] *= std::exp(-u * u / (4.0 * sig2));
  }
  double pc[4] = {0.0, 0.0, 0.0, plan.net_c3};
  kernels::phase_poly(out.amp.data(), g.n, -g.L, g.dx(), pc, 3);
  normalize_mode(out);

  rec.chi2 = 3.0 * plan.res.chi * z * z * q;
  rec.p_disp = -3.0 * plan.res.chi * z * q * q;
  if (sim::boundary_amplitude(out) >= 1e-6) rec.boundary_warnings++;
  rec.fidelity = metrics::fidelity(out, plan.oracle_state);
  fill_moments(rec, out);
  if (plan.cfg.keep_states) rec.state = std::move(out);
  return rec;
}

// --------------------------------------------------------------- quartic gate

struct QuarticPlan {
  CircuitConfig cfg;
  ResourceSpec res4, res3;
  double r0 = 0.0, r4 = 0.0;
  sim::ModeState oracle_state;
  int nq = 2048;
  int nfine_cap = 1 << 14;
  int retry_cap = 64;
};

struct QuarticState {
  sim::JointState J;   // smooth envelope, signal rows x carrier columns
  double delta = 0.0;  // physical carrier coordinate = xi + delta
  PhasePoly A;         // analytic carrier phase in xi
};

// Tap the carrier through (t, r) into an order-k resource and measure the
// resource position. Grid update: column fetch at t*xi via the trig kernel
// times the resource envelope; the nonlinear phase goes into A.
double resource_collapse(QuarticState& st, const ResourceSpec& res, double t,
                         double r, double uniform, const double* forced,
                         int nq, TrajectoryRecord& rec) {
  const auto& gc = st.J.grid_a;
  const int nc = gc.n, ns = st.J.grid_s.n;

  double q;
  if (forced) {
    q = *forced;
  } else {
    std::vector<double> rho(nc);
    kernels::abs2_cols(st.J.amp.data(), ns, nc, rho.data());
    // P(q) = (1/t) sum_xi rho(xi) den((q + r (xi + delta)) / t)
    double sig = std::sqrt(res.sigma2);
    double center = -r * st.delta, half = 6.0 * sig * t + std::abs(r) * gc.L;
    double lo = center - half, dq = 2.0 * half / nq;
    std::vector<double> P(nq);
    for (int i = 0; i < nq; ++i) {
      double qi = lo + (i + 0.5) * dq, acc = 0.0;
      for (int j = 0; j < nc; ++j) {
        double u = (qi + r * (gc.x(j) + st.delta)) / t;
        acc += rho[j] * std::exp(-u * u / (2.0 * res.sigma2));
      }
      P[i] = acc;
    }
    q = sample_density(P, lo + 0.5 * dq, dq, uniform).value;
  }

  double dnew = (st.delta + r * q) / t;
  double qt = r * dnew + t * q;

  std::vector<double> D((size_t)nc * nc);
  for (int c = 0; c < nc; ++c) {
    double xi = gc.x(c), v = t * xi;
    double* row = &D[(size_t)c * nc];
    if (v < -gc.L || v >= gc.L) {
      std::fill(row, row + nc, 0.0);
      continue;
    }
    double e = r * xi + qt;
    double env = std::exp(-e * e / (4.0 * res.sigma2));
    double s = (v + gc.L) / gc.dx();
    for (int j = 0; j < nc; ++j) row[j] = env * dirichlet(s - j, nc);
  }
  std::vector<cplx> out((size_t)ns * nc);
  kernels::matmul_realT(st.J.amp.data(), D.data(), out.data(), ns, nc, nc);
  st.J.amp = std::move(out);
  double nrm = sim::norm(st.J);
  if (!(nrm > 1e-9))
    throw std::runtime_error("resource collapse annihilated the state");
  kernels::scale(st.J.amp.data(), (int)st.J.amp.size(), 1.0 / nrm);

  st.A.scale_arg(t);
  st.A.add_shifted_power(res.chi, r, qt, res.k);
  st.delta = dnew;
  if (sim::boundary_amplitude(st.J) >= 1e-6) rec.boundary_warnings++;
  return q;
}

struct ReadoutResult {
  double y = 0.0;
  sim::ModeState out;
  int n_fine = 0;
};

// Homodyne of sin(theta) x + cos(theta) p on the carrier. The projection is
// a chirped Fourier transform of the envelope times the analytic phase; the
// integrand is evaluated on an upsampled carrier grid sized to its total
// phase gradient. Outcome and collapse both use the sampled frequency bin.
// theta comes from atan so cos(theta) > 0; theta = 0 is a plain momentum
// readout and needs no special casing.
ReadoutResult rotated_readout(const QuarticState& st, double theta,
                              double uniform, const double* forced_y,
                              int nfine_cap, TrajectoryRecord& rec) {
  const auto& gs = st.J.grid_s;
  const auto& gc = st.J.grid_a;
  const int ns = gs.n, nc = gc.n;
  double cth = std::cos(theta), sth = std::sin(theta);
  if (std::abs(cth) < 1e-9) throw Retry{};
  ReadoutResult res;
  res.out.grid = gs;
  res.out.amp.resize(ns);

  PhasePoly B = st.A;
  B.c[2] += sth / (2.0 * cth);
  double a1 = B.c[1];
  B.c[1] = 0.0;  // recentered; the measured bin is offset by a1 below

  double gmax = 0.0;
  for (int m = 0; m <= 128; ++m) {
    double xi = -gc.L + 2.0 * gc.L * m / 128.0;
    gmax = std::max(gmax, std::abs(B.deriv(xi)));
  }
  int ratio = 1;
  while (ratio * gc.k_max() * 0.95 < gmax + gc.k_max()) {
    ratio *= 2;
    if ((size_t)nc * ratio > (size_t)nfine_cap) throw Retry{};
  }
  const int nf = nc * ratio;
  res.n_fine = nf;

  const double dxi = 2.0 * gc.L / nf;
  std::vector<cplx> phase(nf), row(nc), fine(nf);
  for (int m = 0; m < nf; ++m)
    phase[m] = std::polar(1.0, B.eval(-gc.L + m * dxi));

  // band-limited upsampling of one signal row times the analytic phase
  auto upsample = [&](int i) {
    std::memcpy(row.data(), &st.J.amp[(size_t)i * nc], nc * sizeof(cplx));
    if (ratio == 1) {
      std::copy(row.begin(), row.end(), fine.begin());
    } else {
      fft::dft(row.data(), nc, true);
      std::fill(fine.begin(), fine.end(), cplx{});
      int h = nc / 2;
      for (int b = 0; b < h; ++b) fine[b] = row[b];
      for (int b = h + 1; b < nc; ++b) fine[nf - nc + b] = row[b];
      fine[h] = 0.5 * row[h];
      fine[nf - h] = 0.5 * row[h];
      fft::dft(fine.data(), nf, false);
      double sc = 1.0 / nc;
      for (int m = 0; m < nf; ++m) fine[m] *= sc;
    }
    for (int m = 0; m < nf; ++m) fine[m] *= phase[m];
  };

  int bin;
  if (forced_y) {
    double krel = (*forced_y - sth * st.delta) / cth - a1;
    int ib = (int)std::llround(krel / gc.dk());
    ib = std::clamp(ib, -nf / 2, nf / 2 - 1);
    bin = ib >= 0 ? ib : ib + nf;
  } else {
    std::vector<double> Pk(nf, 0.0);
    for (int i = 0; i < ns; ++i) {
      upsample(i);
      fft::dft(fine.data(), nf, true);
      for (int m = 0; m < nf; ++m) Pk[m] += std::norm(fine[m]);
    }
    bin = sample_density(Pk, 0.0, 1.0, uniform).bin;
  }
  double krel = (bin < nf / 2 ? bin : bin - nf) * gc.dk();
  res.y = cth * (krel + a1) + sth * st.delta;

  std::vector<cplx> phasor(nf);
  for (int m = 0; m < nf; ++m)
    phasor[m] = std::polar(1.0, -krel * (-gc.L + m * dxi));
  for (int i = 0; i < ns; ++i) {
    upsample(i);
    cplx acc = 0.0;
    for (int m = 0; m < nf; ++m) acc += fine[m] * phasor[m];
    res.out.amp[i] = acc;
  }
  normalize_mode(res.out);
  if (sim::boundary_amplitude(res.out) >= 1e-6) rec.boundary_warnings++;
  return res;
}

TrajectoryRecord quartic_one(const QuarticPlan& plan,
                             const sim::JointState& J0, double u_first,
                             rng::SplitMix64& gen) {
  const auto& cfg = plan.cfg;
  const auto& f = cfg.forced_outcomes;
  const double* f_q4 = f.size() > 0 ? &f[0] : nullptr;
  const double* f_q3 = f.size() > 1 ? &f[1] : nullptr;
  const double* f_y = f.size() > 2 ? &f[2] : nullptr;
  TrajectoryRecord rec;

  for (int attempt = 0;; ++attempt) {
    if (attempt > plan.retry_cap)
      throw std::runtime_error(
          "trajectory kept hitting rotation / interpolation guards");
    try {
      QuarticState st{J0, 0.0, {}};
      double u1 = attempt == 0 ? u_first : gen.uniform();
      double q4 = resource_collapse(st, plan.res4, cfg.t4, plan.r4, u1, f_q4,
                                    plan.nq, rec);
      auto ff = gains::quartic_feedforward(plan.res3.chi, plan.res4.chi,
                                           cfg.t0, cfg.t4, q4, 0.0);
      double q3 = resource_collapse(st, plan.res3, ff.t3, ff.r3, gen.uniform(),
                                    f_q3, plan.nq, rec);
      ff = gains::quartic_feedforward(plan.res3.chi, plan.res4.chi, cfg.t0,
                                      cfg.t4, q4, q3);
      if (std::abs(std::cos(ff.theta)) < gains::kCosThetaGuard) throw Retry{};
      auto ro = rotated_readout(st, ff.theta, gen.uniform(), f_y,
                                plan.nfine_cap, rec);
      double pd = gains::quartic_displacement(plan.res3.chi, plan.res4.chi,
                                              cfg.t0, cfg.t4, ff.r3_over_t3,
                                              q4, q3, ro.y, ff.theta);
      sim::ModeState out = sim::displace_p(std::move(ro.out), pd);
      rec.outcomes = {q4, q3, ro.y};
      rec.t3 = ff.t3;
      rec.r3 = ff.r3;
      rec.theta = ff.theta;
      rec.p_disp = pd;
      rec.n_fine = ro.n_fine;
      if (sim::boundary_amplitude(out) >= 1e-6) rec.boundary_warnings++;
      rec.fidelity = metrics::fidelity(out, plan.oracle_state);
      fill_moments(rec, out);
      if (cfg.keep_states) rec.state = std::move(out);
      return rec;
    } catch (const Retry&) {
      rec.resampled++;
    } catch (const std::runtime_error&) {
      // outcome-dependent grid guard (displacement reach, annihilation)
      rec.resampled++;
    }
  }
}

// ------------------------------------------------------------- shared driver

template <class OneFn>
RunResult run_loop(const CircuitConfig& cfg, OneFn&& one) {
  RunResult R;
  R.config = cfg;
  const int n = cfg.trajectories;
  R.records.resize(n);

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  if (cfg.sampling == "stratified") {
    rng::SplitMix64 pg{rng::mix64(cfg.seed ^ 0xA5C1D4E9B7F3A210ull)};
    for (int i = n - 1; i > 0; --i) {
      int j = (int)(pg.next() % (std::uint64_t)(i + 1));
      std::swap(perm[i], perm[j]);
    }
  }

  std::vector<std::string> errors(n);
#ifdef CVNL_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(kernels::max_threads())
#endif
  for (int i = 0; i < n; ++i) {
    try {
      rng::SplitMix64 gen = rng::substream(cfg.seed, (std::uint64_t)i);
      double v = gen.uniform();
      double u1 = cfg.sampling == "stratified" ? (perm[i] + v) / n : v;
      R.records[i] = one(u1, gen);
      R.records[i].index = i;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (int i = 0; i < n; ++i)
    if (!errors[i].empty())
      throw std::runtime_error("trajectory " + std::to_string(i) + ": " +
                               errors[i]);

  double sf = 0.0, sv = 0.0;
  for (const auto& r : R.records) {
    sf += r.fidelity;
    sv += r.out_var_x;
    R.total_resampled += r.resampled;
    R.total_boundary_warnings += r.boundary_warnings;
  }
  R.mean_fidelity = sf / n;
  R.mean_var_x = sv / n;
  double s2 = 0.0;
  for (const auto& r : R.records) {
    double d = r.fidelity - R.mean_fidelity;
    s2 += d * d;
  }
  R.std_fidelity = std::sqrt(s2 / n);
  return R;
}

}  // namespace

// ------------------------------------------------------------------- public

sim::ModeState oracle(const sim::ModeState& input, double chi, int order) {
  return sim::nonlinear_phase(input, chi, order);
}

double quartic_oracle_chi(double chi4, double t0, double t4) {
  double r0s = 1.0 - t0 * t0, r4s = 1.0 - t4 * t4;
  return -chi4 * r0s * r0s * r4s * r4s / (std::pow(t0, 4) * std::pow(t4, 4));
}

CircuitConfig resolve(const CircuitConfig& cfg) {
  CircuitConfig c = cfg;
  c.grid.validate();
  if (c.trajectories < 0)
    throw std::invalid_argument("trajectories must be >= 0");
  if (c.sampling != "stratified" && c.sampling != "iid")
    throw std::invalid_argument("sampling must be stratified or iid");
  if (c.gate == "cubic") {
    if (c.ancillas.empty())
      c.ancillas = {sim::AncillaSpec{3, c.chi, c.squeezing_db}};
    if (c.ancillas.size() != 1 || c.ancillas[0].k != 3)
      throw std::invalid_argument(
          "cubic gate needs exactly one order-3 resource");
    double chi3 = c.ancillas[0].chi_k;
    if (chi3 == 0.0 && c.chi != 0.0)
      throw std::invalid_argument(
          "order-3 resource strength must be nonzero for a nonzero target");
    if (std::isnan(c.z))
      c.z = chi3 == 0.0 ? 0.0 : -std::cbrt(c.chi / chi3);
    if (std::abs(c.z * c.z * c.z * chi3 + c.chi) >
        1e-9 * std::max(1.0, std::abs(c.chi)))
      throw std::invalid_argument(
          "coupling inconsistent with target: z^3 chi3 must equal -chi");
  } else if (c.gate == "quartic") {
    c.carrier_grid.validate();
    if (c.carrier.k != 0)
      throw std::invalid_argument("carrier resource must have order 0");
    if (!(c.t0 > 0.0 && c.t0 < 1.0) || !(c.t4 > 0.0 && c.t4 < 1.0))
      throw std::invalid_argument("transmissivities must lie in (0, 1)");
    if (c.ancillas.empty())
      c.ancillas = {sim::AncillaSpec{4, c.chi, c.squeezing_db},
                    sim::AncillaSpec{3, 0.1, c.squeezing_db}};
    if (c.ancillas.size() != 2 || c.ancillas[0].k != 4 || c.ancillas[1].k != 3)
      throw std::invalid_argument(
          "quartic gate needs resources of order 4 then 3");
    c.chi = c.ancillas[0].chi_k;  // the order-4 strength is authoritative
    if (c.ancillas[1].chi_k == 0.0)
      throw std::invalid_argument(
          "order-3 resource strength must be nonzero (it scales the adaptive "
          "splitter)");
  } else {
    throw std::invalid_argument("unknown gate: " + c.gate);
  }
  return c;
}

RunResult run_cubic(const CircuitConfig& cfg, const sim::ModeState& input) {
  CircuitConfig c = resolve(cfg);
  if (c.gate != "cubic") throw std::invalid_argument("config gate is not cubic");
  if (!(input.grid == c.grid))
    throw std::invalid_argument("input grid differs from config grid");
  CubicPlan plan;
  plan.cfg = c;
  plan.res = resource_for(c.ancillas[0]);
  plan.net_c3 = c.z * c.z * c.z * plan.res.chi;
  plan.oracle_state = oracle(input, c.chi, 3);
  const double* forced =
      c.forced_outcomes.empty() ? nullptr : &c.forced_outcomes[0];
  RunResult R = run_loop(c, [&](double u1, rng::SplitMix64&) {
    return cubic_one(plan, input, u1, forced);
  });
  R.oracle_chi = c.chi;
  return R;
}

RunResult run_cubic(const CircuitConfig& cfg) {
  CircuitConfig c = resolve(cfg);
  return run_cubic(c, sim::make_vacuum(c.grid));
}

RunResult run_quartic(const CircuitConfig& cfg, const sim::ModeState& input) {
  CircuitConfig c = resolve(cfg);
  if (c.gate != "quartic")
    throw std::invalid_argument("config gate is not quartic");
  if (!(input.grid == c.grid))
    throw std::invalid_argument("input grid differs from config grid");
  QuarticPlan plan;
  plan.cfg = c;
  plan.res4 = resource_for(c.ancillas[0]);
  plan.res3 = resource_for(c.ancillas[1]);
  plan.r0 = std::sqrt(1.0 - c.t0 * c.t0);
  plan.r4 = std::sqrt(1.0 - c.t4 * c.t4);
  plan.oracle_state =
      oracle(input, quartic_oracle_chi(c.chi, c.t0, c.t4), 4);

  // everything up to the first measurement is trajectory-independent
  sim::ModeState pre = sim::squeeze(input, c.t0);
  sim::ModeState car = sim::make_ancilla(c.carrier, c.carrier_grid);
  sim::JointState J0 = sim::beamsplitter(sim::tensor(pre, car), c.t0, -plan.r0);

  RunResult R = run_loop(c, [&](double u1, rng::SplitMix64& gen) {
    return quartic_one(plan, J0, u1, gen);
  });
  R.oracle_chi = quartic_oracle_chi(c.chi, c.t0, c.t4);
  return R;
}

RunResult run_quartic(const CircuitConfig& cfg) {
  CircuitConfig c = resolve(cfg);
  return run_quartic(c, sim::make_vacuum(c.grid));
}

TrajectoryRecord cubic_joint_reference(const CircuitConfig& cfg,
                                       const sim::ModeState& input,
                                       rng::SplitMix64& gen) {
  CircuitConfig c = resolve(cfg);
  if (c.gate != "cubic") throw std::invalid_argument("config gate is not cubic");
  double chi3 = c.ancillas[0].chi_k;
  sim::ModeState anc = sim::make_ancilla(c.ancillas[0], input.grid);
  sim::JointState js = sim::qnd(sim::tensor(input, anc), c.z);
  auto hr = sim::homodyne_x(js, sim::Axis::ancilla, gen);
  // the collapse slice sits at the sampled bin; snap the outcome to keep the
  // correction unitaries consistent with it
  int bin = std::clamp(
      (int)std::llround((hr.outcome + input.grid.L) / input.grid.dx()), 0,
      input.grid.n - 1);
  double q = input.grid.x(bin);
  TrajectoryRecord rec;
  rec.outcomes = {q};
  rec.chi2 = 3.0 * chi3 * c.z * c.z * q;
  rec.p_disp = -3.0 * chi3 * c.z * q * q;
  sim::ModeState out = sim::nonlinear_phase(hr.kept, rec.chi2, 2);
  out = sim::displace_p(std::move(out), rec.p_disp);
  if (sim::boundary_amplitude(out) >= 1e-6) rec.boundary_warnings++;
  rec.fidelity = metrics::fidelity(out, oracle(input, c.chi, 3));
  fill_moments(rec, out);
  rec.state = std::move(out);
  return rec;
}

SymbolicReport symbolic_run(int N, const std::string& scheme, double chi,
                            const gains::OutcomeVector* outcomes) {
  SymbolicReport rep;
  rep.N = N;
  rep.scheme = scheme;
  gains::OutcomeVector defaults;
  if (!outcomes) {
    for (int k = 2; k <= N; ++k) defaults.q[k] = -0.5;
    defaults.y = 0.0;
    outcomes = &defaults;
  }

  if (scheme == "quartic-optical") {
    if (N != 4)
      throw std::invalid_argument("quartic-optical scheme is order 4 only");
    auto qd = algebra::derive_quartic_optical();
    rep.quartic_term_match = qd.x_exact && qd.p_exact;
    rep.cube_root_certified = qd.cube_root_certified;
    rep.final_relation =
        "x_out = " + qd.x_derived.str() + "\np_out = " + qd.p_derived.str();
    double q4 = outcomes->q.count(4) ? outcomes->q.at(4) : -0.5;
    double q3 = outcomes->q.count(3) ? outcomes->q.at(3) : -0.5;
    double y = outcomes->y.value_or(0.0);
    rep.program = gains::make_quartic_program(0.1, chi, 0.9, 0.9, q4, q3, y);
    gains::check_causality(rep.program);
    rep.pass = rep.quartic_term_match && rep.cube_root_certified &&
               rep.program.all_real;
    rep.notes = qd.notes;
    return rep;
  }

  int nmax = scheme == "beamsplitter" ? 6 : algebra::kOrderMax;
  if (scheme != "beamsplitter" && scheme != "qnd-inline" &&
      scheme != "qnd-measurement-induced")
    throw std::invalid_argument("unknown scheme: " + scheme);
  if (N < algebra::kOrderMin || N > nmax)
    throw std::invalid_argument("order out of range for scheme " + scheme);

  auto cert = algebra::certify_scheme(N, scheme);
  rep.residual_zero = cert.residual_zero;
  rep.structural_ok = cert.structural_ok;
  rep.notes = cert.notes;
  auto der = algebra::derive_final_relation(N, scheme);
  rep.final_relation =
      "x_out = " + der.x_out.str() + "\np_out = " + der.p_out.str();
  rep.program = scheme == "beamsplitter"
                    ? gains::solve_bs_ratios(N, chi, *outcomes)
                    : gains::solve_qnd_gains(N, chi, *outcomes);
  gains::check_causality(rep.program);
  rep.forward_residual = gains::forward_residual_error(rep.program, *outcomes);
  bool structural = true;
  for (bool b : rep.structural_ok) structural = structural && b;
  rep.pass = rep.residual_zero && structural &&
             rep.forward_residual <= 1e-10 * std::max(1.0, std::abs(chi));
  return rep;
}

}  // namespace cvnl::circuits
