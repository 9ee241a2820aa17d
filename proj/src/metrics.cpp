#include "cvnl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cvnl/kernels.hpp"
#include "cvnl/rng.hpp"

namespace cvnl::metrics {

namespace kn = cvnl::kernels;
using sim::cplx;

double fidelity(const sim::ModeState& a, const sim::ModeState& b) {
  if (!(a.grid == b.grid))
    throw std::invalid_argument("fidelity requires matching grids");
  const cplx ov = kn::dot(a.amp.data(), b.amp.data(), a.grid.n) * a.grid.dx();
  const double na = kn::abs2_sum(a.amp.data(), a.grid.n) * a.grid.dx();
  const double nb = kn::abs2_sum(b.amp.data(), b.grid.n) * b.grid.dx();
  if (na <= 0.0 || nb <= 0.0)
    throw std::invalid_argument("fidelity of a null state");
  return std::norm(ov) / (na * nb);
}

VarianceReport nonlinear_variance(const sim::ModeState& s, int k, double chi) {
  const int n = s.grid.n;
  const double dx = s.grid.dx();
  std::vector<cplx> d = s.amp;
  kn::dft_rows(d.data(), 1, n, true);
  std::vector<cplx> ikf(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    ikf[static_cast<std::size_t>(j)] = cplx(0.0, s.grid.k(j));
  kn::mul_cols(d.data(), 1, n, ikf.data());
  kn::dft_rows(d.data(), 1, n, false);

  std::vector<cplx> xi(static_cast<std::size_t>(n));
  const bool plain = k == 0 || chi == 0.0;
  for (int j = 0; j < n; ++j) {
    const cplx p_psi = cplx(0.0, -1.0) * d[static_cast<std::size_t>(j)];
    if (plain) {
      xi[static_cast<std::size_t>(j)] = p_psi;
    } else {
      double w = 1.0;
      const double x = s.grid.x(j);
      for (int m = 0; m < k - 1; ++m) w *= x;
      xi[static_cast<std::size_t>(j)] =
          p_psi - k * chi * w * s.amp[static_cast<std::size_t>(j)];
    }
  }
  const double w0 = kn::abs2_sum(s.amp.data(), n) * dx;
  if (w0 <= 0.0) throw std::invalid_argument("variance of a null state");
  const double m1 = std::real(kn::dot(s.amp.data(), xi.data(), n)) * dx / w0;
  const double m2 = kn::abs2_sum(xi.data(), n) * dx / w0;
  VarianceReport r;
  r.k = k;
  r.chi = chi;
  r.value = m2 - m1 * m1;
  r.vacuum_ratio = r.value / 0.5;
  return r;
}

Eq17Report eq17_criterion(const sim::ModeState& a3, const sim::ModeState& a4,
                          double chi3) {
  Eq17Report rep;
  rep.lhs = nonlinear_variance(a3, 3, chi3).value;
  const int n = a4.grid.n;
  const double dx = a4.grid.dx();
  double w0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double w = std::norm(a4.amp[static_cast<std::size_t>(j)]) * dx;
    const double c = std::cbrt(a4.grid.x(j));  // signed real cube root
    w0 += w;
    m1 += c * w;
    m2 += c * c * w;
  }
  if (w0 <= 0.0) throw std::invalid_argument("eq17 on a null state");
  m1 /= w0;
  m2 /= w0;
  const double var_cbrt = m2 - m1 * m1;
  rep.rhs = var_cbrt > 0.0 ? 1.0 / var_cbrt : 0.0;
  rep.margin = rep.lhs > 0.0 ? rep.rhs / rep.lhs : 0.0;
  rep.satisfied = rep.margin > 1.0;
  return rep;
}

BootstrapCI bootstrap_mean_ci(const std::vector<double>& xs, int resamples,
                              double level, std::uint64_t seed) {
  if (xs.empty()) throw std::invalid_argument("bootstrap of an empty sample");
  if (resamples < 2) throw std::invalid_argument("need at least 2 resamples");
  const std::size_t n = xs.size();
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (int b = 0; b < resamples; ++b) {
    rng::SplitMix64 gen = rng::substream(seed, static_cast<std::uint64_t>(b));
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      s += xs[static_cast<std::size_t>(gen.next() % n)];
    means[static_cast<std::size_t>(b)] = s / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double alpha = 0.5 * (1.0 - level);
  auto pick = [&](double q) {
    double pos = q * (resamples - 1);
    int lo = static_cast<int>(pos);
    int hi = lo + 1 < resamples ? lo + 1 : lo;
    double f = pos - lo;
    return means[static_cast<std::size_t>(lo)] * (1.0 - f) +
           means[static_cast<std::size_t>(hi)] * f;
  };
  return {pick(alpha), pick(1.0 - alpha)};
}

}  // namespace cvnl::metrics
