#include "cvnl/statesim.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cvnl/kernels.hpp"

namespace cvnl::sim {

namespace kn = cvnl::kernels;

namespace {

std::atomic<int> g_boundary_warnings{0};
std::atomic<std::size_t> g_tensor_cap{std::size_t(1) << 24};

void note_boundary(double edge) {
  if (edge >= 1e-6)
    g_boundary_warnings.fetch_add(1, std::memory_order_relaxed);
}

std::vector<double> k_values(const GridSpec& g) {
  std::vector<double> k(static_cast<std::size_t>(g.n));
  for (int j = 0; j < g.n; ++j) k[static_cast<std::size_t>(j)] = g.k(j);
  return k;
}

std::vector<cplx> ik_values(const GridSpec& g) {
  std::vector<cplx> f(static_cast<std::size_t>(g.n));
  for (int j = 0; j < g.n; ++j) f[static_cast<std::size_t>(j)] = cplx(0.0, g.k(j));
  return f;
}

void normalize(ModeState& s) {
  const double nrm = norm(s);
  if (nrm <= 0.0) throw std::runtime_error("cannot normalize a null state");
  kn::scale(s.amp.data(), s.grid.n, 1.0 / nrm);
}

// Psi(xs, xa) -> Psi(xs, xa + shift_i) per row, exact in the band limit
void shear_rows(JointState& s, const std::vector<double>& shift) {
  kn::dft_rows(s.amp.data(), s.grid_s.n, s.grid_a.n, true);
  const auto kv = k_values(s.grid_a);
  kn::mul_outer(s.amp.data(), s.grid_s.n, s.grid_a.n, shift.data(), kv.data());
  kn::dft_rows(s.amp.data(), s.grid_s.n, s.grid_a.n, false);
}

// Psi(xs, xa) -> Psi(xs + shift_j, xa) per column
void shear_cols(JointState& s, const std::vector<double>& shift) {
  const int ns = s.grid_s.n, na = s.grid_a.n;
  std::vector<cplx> t(s.amp.size());
  kn::transpose(s.amp.data(), t.data(), ns, na);
  kn::dft_rows(t.data(), na, ns, true);
  const auto kv = k_values(s.grid_s);
  kn::mul_outer(t.data(), na, ns, shift.data(), kv.data());
  kn::dft_rows(t.data(), na, ns, false);
  kn::transpose(t.data(), s.amp.data(), na, ns);
}

std::vector<cplx> deriv_1d(const ModeState& s) {
  std::vector<cplx> d = s.amp;
  kn::dft_rows(d.data(), 1, s.grid.n, true);
  const auto ikf = ik_values(s.grid);
  kn::mul_cols(d.data(), 1, s.grid.n, ikf.data());
  kn::dft_rows(d.data(), 1, s.grid.n, false);
  return d;
}

std::vector<cplx> deriv_a(const JointState& s) {
  std::vector<cplx> d = s.amp;
  kn::dft_rows(d.data(), s.grid_s.n, s.grid_a.n, true);
  const auto ikf = ik_values(s.grid_a);
  kn::mul_cols(d.data(), s.grid_s.n, s.grid_a.n, ikf.data());
  kn::dft_rows(d.data(), s.grid_s.n, s.grid_a.n, false);
  return d;
}

std::vector<cplx> deriv_s(const JointState& s) {
  const int ns = s.grid_s.n, na = s.grid_a.n;
  std::vector<cplx> t(s.amp.size()), d(s.amp.size());
  kn::transpose(s.amp.data(), t.data(), ns, na);
  kn::dft_rows(t.data(), na, ns, true);
  const auto ikf = ik_values(s.grid_s);
  kn::mul_cols(t.data(), na, ns, ikf.data());
  kn::dft_rows(t.data(), na, ns, false);
  kn::transpose(t.data(), d.data(), na, ns);
  return d;
}

int required_points(double L, double need) {
  int n = 64;
  while (M_PI * n / (2.0 * L) < need / 0.95 && n < (1 << 28)) n <<= 1;
  return n;
}

// worst-case |x| + 6 sigma reach of the state in x and p
void extent(const ModeState& s, double& x_ext, double& p_ext) {
  const ModeMoments m = mode_moments(s);
  x_ext = std::abs(m.mean_x) + 5.0 * std::sqrt(std::max(m.var_x, 0.0));
  p_ext = std::abs(m.mean_p) + 5.0 * std::sqrt(std::max(m.var_p, 0.0));
}

void guard_momentum(const ModeState& s, double added, const char* what) {
  double x_ext, p_ext;
  extent(s, x_ext, p_ext);
  const double need = p_ext + added;
  if (need > 0.95 * s.grid.k_max()) {
    std::ostringstream msg;
    msg << what << ": instantaneous frequency " << need
        << " exceeds 0.95 * momentum half-range " << 0.95 * s.grid.k_max()
        << "; need n_points >= " << required_points(s.grid.L, need)
        << " at L = " << s.grid.L;
    throw std::runtime_error(msg.str());
  }
}

double pow_int(double x, int p) {
  double w = 1.0;
  for (int k = 0; k < p; ++k) w *= x;
  return w;
}

}  // namespace

double norm(const ModeState& s) {
  return std::sqrt(kn::abs2_sum(s.amp.data(), s.grid.n) * s.grid.dx());
}

double norm(const JointState& s) {
  return std::sqrt(kn::abs2_sum(s.amp.data(), s.grid_s.n * s.grid_a.n) *
                   s.grid_s.dx() * s.grid_a.dx());
}

double boundary_amplitude(const ModeState& s) {
  return std::max(std::abs(s.amp.front()), std::abs(s.amp.back()));
}

double boundary_amplitude(const JointState& s) {
  const int ns = s.grid_s.n, na = s.grid_a.n;
  double m = 0.0;
  for (int j = 0; j < na; ++j) {
    m = std::max(m, std::abs(s.amp[static_cast<std::size_t>(j)]));
    m = std::max(m, std::abs(s.amp[static_cast<std::size_t>(ns - 1) * na + j]));
  }
  for (int i = 0; i < ns; ++i) {
    m = std::max(m, std::abs(s.amp[static_cast<std::size_t>(i) * na]));
    m = std::max(m, std::abs(s.amp[static_cast<std::size_t>(i) * na + na - 1]));
  }
  return m;
}

int boundary_warnings() {
  return g_boundary_warnings.load(std::memory_order_relaxed);
}

void reset_boundary_warnings() {
  g_boundary_warnings.store(0, std::memory_order_relaxed);
}

std::size_t tensor_cap() { return g_tensor_cap.load(std::memory_order_relaxed); }

void set_tensor_cap(std::size_t cap) {
  g_tensor_cap.store(cap, std::memory_order_relaxed);
}

ModeMoments mode_moments(const ModeState& s) {
  const int n = s.grid.n;
  const double dx = s.grid.dx(), x0 = -s.grid.L;
  const double w0 = kn::abs2_sum(s.amp.data(), n) * dx;
  if (w0 <= 0.0) throw std::runtime_error("moments of a null state");
  const double w1 = kn::weighted_abs2(s.amp.data(), n, x0, dx, 1) * dx;
  const double w2 = kn::weighted_abs2(s.amp.data(), n, x0, dx, 2) * dx;
  const auto d = deriv_1d(s);
  const double mp = std::imag(kn::dot(s.amp.data(), d.data(), n)) * dx / w0;
  const double p2 = kn::abs2_sum(d.data(), n) * dx / w0;
  std::vector<cplx> xpsi(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    xpsi[static_cast<std::size_t>(j)] = (x0 + j * dx) * s.amp[static_cast<std::size_t>(j)];
  const double xp = std::imag(kn::dot(xpsi.data(), d.data(), n)) * dx / w0;
  ModeMoments m;
  m.mean_x = w1 / w0;
  m.mean_p = mp;
  m.var_x = w2 / w0 - m.mean_x * m.mean_x;
  m.var_p = p2 - mp * mp;
  m.cov_xp = xp - m.mean_x * mp;
  return m;
}

JointMoments joint_moments(const JointState& s) {
  const int ns = s.grid_s.n, na = s.grid_a.n;
  const double dxs = s.grid_s.dx(), dxa = s.grid_a.dx(), dV = dxs * dxa;
  const std::size_t total = static_cast<std::size_t>(ns) * na;

  std::vector<double> ms(static_cast<std::size_t>(ns)), ma(static_cast<std::size_t>(na));
  kn::abs2_rows(s.amp.data(), ns, na, ms.data());
  kn::abs2_cols(s.amp.data(), ns, na, ma.data());
  double w0 = 0.0;
  for (int i = 0; i < ns; ++i) w0 += ms[static_cast<std::size_t>(i)];
  w0 *= dV;
  if (w0 <= 0.0) throw std::runtime_error("moments of a null state");

  double xs1 = 0.0, xs2 = 0.0, xa1 = 0.0, xa2 = 0.0;
  for (int i = 0; i < ns; ++i) {
    const double x = s.grid_s.x(i), w = ms[static_cast<std::size_t>(i)] * dV;
    xs1 += x * w;
    xs2 += x * x * w;
  }
  for (int j = 0; j < na; ++j) {
    const double y = s.grid_a.x(j), w = ma[static_cast<std::size_t>(j)] * dV;
    xa1 += y * w;
    xa2 += y * y * w;
  }
  double xsxa = 0.0;
  for (int i = 0; i < ns; ++i) {
    const double x = s.grid_s.x(i);
    double row = 0.0;
    for (int j = 0; j < na; ++j)
      row += s.grid_a.x(j) * std::norm(s.amp[static_cast<std::size_t>(i) * na + j]);
    xsxa += x * row;
  }
  xsxa *= dV;

  const auto ds = deriv_s(s);
  const auto da = deriv_a(s);
  const int nt = static_cast<int>(total);
  const double ps1 = std::imag(kn::dot(s.amp.data(), ds.data(), nt)) * dV;
  const double pa1 = std::imag(kn::dot(s.amp.data(), da.data(), nt)) * dV;
  const double ps2 = kn::abs2_sum(ds.data(), nt) * dV;
  const double pa2 = kn::abs2_sum(da.data(), nt) * dV;
  const double pspa = std::real(kn::dot(ds.data(), da.data(), nt)) * dV;

  std::vector<cplx> xs_psi = s.amp, xa_psi = s.amp;
  {
    std::vector<cplx> fr(static_cast<std::size_t>(ns)), fc(static_cast<std::size_t>(na));
    for (int i = 0; i < ns; ++i) fr[static_cast<std::size_t>(i)] = s.grid_s.x(i);
    for (int j = 0; j < na; ++j) fc[static_cast<std::size_t>(j)] = s.grid_a.x(j);
    kn::mul_rows(xs_psi.data(), ns, na, fr.data());
    kn::mul_cols(xa_psi.data(), ns, na, fc.data());
  }
  const double xsps = std::imag(kn::dot(xs_psi.data(), ds.data(), nt)) * dV;
  const double xspa = std::imag(kn::dot(xs_psi.data(), da.data(), nt)) * dV;
  const double xaps = std::imag(kn::dot(xa_psi.data(), ds.data(), nt)) * dV;
  const double xapa = std::imag(kn::dot(xa_psi.data(), da.data(), nt)) * dV;

  JointMoments jm;
  const double m_xs = xs1 / w0, m_ps = ps1 / w0, m_xa = xa1 / w0, m_pa = pa1 / w0;
  jm.mean = {m_xs, m_ps, m_xa, m_pa};
  const double c_xx = xs2 / w0 - m_xs * m_xs;
  const double c_pp = ps2 / w0 - m_ps * m_ps;
  const double c_yy = xa2 / w0 - m_xa * m_xa;
  const double c_qq = pa2 / w0 - m_pa * m_pa;
  const double c_xp = xsps / w0 - m_xs * m_ps;
  const double c_xy = xsxa / w0 - m_xs * m_xa;
  const double c_xq = xspa / w0 - m_xs * m_pa;
  const double c_py = xaps / w0 - m_xa * m_ps;
  const double c_pq = pspa / w0 - m_ps * m_pa;
  const double c_yq = xapa / w0 - m_xa * m_pa;
  jm.cov = {{{c_xx, c_xp, c_xy, c_xq},
             {c_xp, c_pp, c_py, c_pq},
             {c_xy, c_py, c_yy, c_yq},
             {c_xq, c_pq, c_yq, c_qq}}};
  return jm;
}

ModeState make_vacuum(const GridSpec& grid) {
  grid.validate();
  ModeState out{grid, std::vector<cplx>(static_cast<std::size_t>(grid.n))};
  for (int j = 0; j < grid.n; ++j) {
    const double x = grid.x(j);
    out.amp[static_cast<std::size_t>(j)] = std::exp(-0.5 * x * x);
  }
  normalize(out);
  note_boundary(boundary_amplitude(out));
  return out;
}

ModeState make_ancilla(const AncillaSpec& spec, const GridSpec& grid) {
  grid.validate();
  if (spec.k < 0) throw std::invalid_argument("ancilla order must be >= 0");
  if (spec.squeezing_db < 0.0)
    throw std::invalid_argument("squeezing_db must be >= 0");
  const double shrink = std::pow(10.0, -spec.squeezing_db / 10.0);
  // k = 0: carrier squeezed in x. k >= 1: Gaussian squeezed in p so the
  // nonlinear quadrature p - k chi x^(k-1) inherits the squeezed variance.
  const double var_x = spec.k == 0 ? 0.5 * shrink : 0.5 / shrink;
  const double sig_p = 0.5 / std::sqrt(var_x);
  const double grad =
      spec.k >= 1 ? spec.k * std::abs(spec.chi_k) * pow_int(grid.L, spec.k - 1)
                  : 0.0;
  const double need = grad + 5.0 * sig_p;
  if (need > 0.95 * grid.k_max()) {
    std::ostringstream msg;
    msg << "ancilla phase gradient " << need
        << " exceeds 0.95 * momentum half-range " << 0.95 * grid.k_max()
        << "; need n_points >= " << required_points(grid.L, need)
        << " at L = " << grid.L;
    throw std::runtime_error(msg.str());
  }
  ModeState out{grid, std::vector<cplx>(static_cast<std::size_t>(grid.n))};
  const double inv4v = 1.0 / (4.0 * var_x);
  for (int j = 0; j < grid.n; ++j) {
    const double x = grid.x(j);
    out.amp[static_cast<std::size_t>(j)] = std::exp(-x * x * inv4v);
  }
  normalize(out);
  if (spec.chi_k != 0.0) {
    std::vector<double> c(static_cast<std::size_t>(spec.k) + 1, 0.0);
    c[static_cast<std::size_t>(spec.k)] = spec.chi_k;
    kn::phase_poly(out.amp.data(), grid.n, -grid.L, grid.dx(), c.data(), spec.k);
  }
  note_boundary(boundary_amplitude(out));
  return out;
}

JointState tensor(const ModeState& s, const ModeState& a) {
  const std::size_t total = static_cast<std::size_t>(s.grid.n) * a.grid.n;
  if (total > tensor_cap()) {
    std::ostringstream msg;
    msg << "tensor of " << s.grid.n << " x " << a.grid.n << " exceeds cap "
        << tensor_cap();
    throw std::runtime_error(msg.str());
  }
  JointState out{s.grid, a.grid, std::vector<cplx>(total)};
  const int na = a.grid.n;
  for (int i = 0; i < s.grid.n; ++i) {
    const cplx si = s.amp[static_cast<std::size_t>(i)];
    for (int j = 0; j < na; ++j)
      out.amp[static_cast<std::size_t>(i) * na + j] = si * a.amp[static_cast<std::size_t>(j)];
  }
  note_boundary(boundary_amplitude(out));
  return out;
}

JointState qnd(JointState s, double z, QndDirection dir) {
  if (z != 0.0) {
    if (dir == QndDirection::signal_x) {
      if (std::abs(z) * s.grid_s.L > s.grid_a.L)
        throw std::runtime_error("qnd shear exceeds ancilla half-width (wraparound)");
      std::vector<double> shift(static_cast<std::size_t>(s.grid_s.n));
      for (int i = 0; i < s.grid_s.n; ++i)
        shift[static_cast<std::size_t>(i)] = z * s.grid_s.x(i);
      shear_rows(s, shift);  // Psi(xs, xa) -> Psi(xs, xa + z xs)
    } else {
      if (std::abs(z) * s.grid_a.L > s.grid_s.L)
        throw std::runtime_error("qnd shear exceeds signal half-width (wraparound)");
      std::vector<double> shift(static_cast<std::size_t>(s.grid_a.n));
      for (int j = 0; j < s.grid_a.n; ++j)
        shift[static_cast<std::size_t>(j)] = z * s.grid_a.x(j);
      shear_cols(s, shift);  // Psi(xs, xa) -> Psi(xs + z xa, xa)
    }
  }
  note_boundary(boundary_amplitude(s));
  return s;
}

JointState beamsplitter(JointState s, double t, double r) {
  if (std::abs(t * t + r * r - 1.0) > 1e-12)
    throw std::invalid_argument("beamsplitter requires t^2 + r^2 = 1");
  if (!(t > 0.0))
    throw std::invalid_argument("beamsplitter transmission must be positive");
  if (r != 0.0) {
    const double phi = std::atan2(r, t);
    const double a = -std::tan(0.5 * phi);
    const double b = std::sin(phi);
    if (std::abs(a) * s.grid_a.L > s.grid_s.L ||
        std::abs(b) * s.grid_s.L > s.grid_a.L)
      throw std::runtime_error("beamsplitter shear exceeds grid half-width (wraparound)");
    std::vector<double> sa(static_cast<std::size_t>(s.grid_a.n));
    for (int j = 0; j < s.grid_a.n; ++j)
      sa[static_cast<std::size_t>(j)] = a * s.grid_a.x(j);
    std::vector<double> sb(static_cast<std::size_t>(s.grid_s.n));
    for (int i = 0; i < s.grid_s.n; ++i)
      sb[static_cast<std::size_t>(i)] = b * s.grid_s.x(i);
    shear_cols(s, sa);
    shear_rows(s, sb);
    shear_cols(s, sa);
  }
  note_boundary(boundary_amplitude(s));
  return s;
}

ModeState phase_rotate(ModeState s, double theta) {
  double th = std::remainder(theta, 2.0 * M_PI);
  if (std::abs(th) > 0.5 * M_PI + 1e-15) {
    // rotation by pi = parity on the periodic grid
    const int n = s.grid.n;
    std::vector<cplx> rev(static_cast<std::size_t>(n));
    rev[0] = s.amp[0];
    for (int j = 1; j < n; ++j)
      rev[static_cast<std::size_t>(j)] = s.amp[static_cast<std::size_t>(n - j)];
    s.amp = std::move(rev);
    th += th > 0.0 ? -M_PI : M_PI;
  }
  if (std::abs(th) > 1e-15) {
    double x_ext, p_ext;
    extent(s, x_ext, p_ext);
    const double c = std::abs(std::cos(th)), sn = std::abs(std::sin(th));
    const double x_need = c * x_ext + sn * p_ext;
    const double p_need = sn * x_ext + c * p_ext;
    if (x_need > s.grid.L || p_need > 0.95 * s.grid.k_max()) {
      std::ostringstream msg;
      msg << "phase_rotate would push the state outside the grid (x reach "
          << x_need << " vs L = " << s.grid.L << ", p reach " << p_need
          << " vs " << 0.95 * s.grid.k_max() << ")";
      throw std::runtime_error(msg.str());
    }
    const double beta = -0.5 * std::tan(0.5 * th);
    const double gamma = -0.5 * std::sin(th);
    const double cb[3] = {0.0, 0.0, beta};
    kn::phase_poly(s.amp.data(), s.grid.n, -s.grid.L, s.grid.dx(), cb, 2);
    kn::dft_rows(s.amp.data(), 1, s.grid.n, true);
    std::vector<cplx> f(static_cast<std::size_t>(s.grid.n));
    for (int j = 0; j < s.grid.n; ++j) {
      const double k = s.grid.k(j);
      f[static_cast<std::size_t>(j)] = std::exp(cplx(0.0, gamma * k * k));
    }
    kn::mul_cols(s.amp.data(), 1, s.grid.n, f.data());
    kn::dft_rows(s.amp.data(), 1, s.grid.n, false);
    kn::phase_poly(s.amp.data(), s.grid.n, -s.grid.L, s.grid.dx(), cb, 2);
  }
  note_boundary(boundary_amplitude(s));
  return s;
}

ModeState squeeze(ModeState st, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("squeeze factor must be positive");
  if (s != 1.0) {
    const int n = st.grid.n;
    const double dx = st.grid.dx(), L = st.grid.L;
    const double rs = std::sqrt(s);
    // periodic sinc resampling: out(x_c) = sqrt(s) sum_m psi(x_m) D((s x_c - x_m)/dx)
    std::vector<double> D(static_cast<std::size_t>(n) * n);
    for (int c = 0; c < n; ++c) {
      const double y = s * (-L + c * dx);
      if (y < -L || y >= L) continue;  // outside the domain the state is 0,
                                       // not its periodic image
      for (int m = 0; m < n; ++m) {
        double u = (y - (-L + m * dx)) / dx;
        u -= n * std::round(u / n);
        double val;
        if (std::abs(u) < 1e-12) {
          val = 1.0;
        } else {
          val = std::sin(M_PI * u) * std::cos(M_PI * u / n) /
                (n * std::sin(M_PI * u / n));
        }
        D[static_cast<std::size_t>(c) * n + m] = rs * val;
      }
    }
    std::vector<cplx> out(static_cast<std::size_t>(n));
    kn::matmul_realT(st.amp.data(), D.data(), out.data(), 1, n, n);
    st.amp = std::move(out);
  }
  note_boundary(boundary_amplitude(st));
  return st;
}

ModeState displace_p(ModeState s, double d) {
  if (d != 0.0) {
    guard_momentum(s, std::abs(d), "displace_p");
    const double c[2] = {0.0, d};
    kn::phase_poly(s.amp.data(), s.grid.n, -s.grid.L, s.grid.dx(), c, 1);
  }
  note_boundary(boundary_amplitude(s));
  return s;
}

ModeState nonlinear_phase(ModeState s, double chi, int order) {
  if (order < 1) throw std::invalid_argument("nonlinear_phase order must be >= 1");
  if (chi != 0.0) {
    guard_momentum(s, order * std::abs(chi) * pow_int(s.grid.L, order - 1),
                   "nonlinear_phase");
    std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
    c[static_cast<std::size_t>(order)] = -chi;
    kn::phase_poly(s.amp.data(), s.grid.n, -s.grid.L, s.grid.dx(), c.data(),
                   order);
  }
  note_boundary(boundary_amplitude(s));
  return s;
}

HomodyneResult homodyne_x(const JointState& s, Axis measured,
                          rng::SplitMix64& gen) {
  const int ns = s.grid_s.n, na = s.grid_a.n;
  const double dV = s.grid_s.dx() * s.grid_a.dx();
  const GridSpec& gm = measured == Axis::signal ? s.grid_s : s.grid_a;
  const GridSpec& gk = measured == Axis::signal ? s.grid_a : s.grid_s;
  std::vector<double> w(static_cast<std::size_t>(gm.n));
  if (measured == Axis::signal)
    kn::abs2_rows(s.amp.data(), ns, na, w.data());
  else
    kn::abs2_cols(s.amp.data(), ns, na, w.data());
  double tot = 0.0;
  for (int i = 0; i < gm.n; ++i) tot += w[static_cast<std::size_t>(i)];
  if (tot * dV < 1e-12)
    throw std::runtime_error("degenerate homodyne marginal");

  const double u = gen.uniform() * tot;
  int idx = -1;
  double cum = 0.0;
  for (int i = 0; i < gm.n; ++i) {
    if (u < cum + w[static_cast<std::size_t>(i)]) {
      idx = i;  // w[idx] > u - cum >= 0 here, so the bin has mass
      break;
    }
    cum += w[static_cast<std::size_t>(i)];
  }
  double frac = 0.5;
  if (idx < 0) {
    // rounding pushed u past the accumulated total; take the last massive bin
    for (int i = gm.n - 1; i >= 0; --i)
      if (w[static_cast<std::size_t>(i)] > 0.0) {
        idx = i;
        break;
      }
  } else {
    frac = (u - cum) / w[static_cast<std::size_t>(idx)];
  }
  const double outcome = gm.x(idx) + (frac - 0.5) * gm.dx();

  ModeState kept{gk, std::vector<cplx>(static_cast<std::size_t>(gk.n))};
  if (measured == Axis::signal) {
    for (int j = 0; j < na; ++j)
      kept.amp[static_cast<std::size_t>(j)] = s.amp[static_cast<std::size_t>(idx) * na + j];
  } else {
    for (int i = 0; i < ns; ++i)
      kept.amp[static_cast<std::size_t>(i)] = s.amp[static_cast<std::size_t>(i) * na + idx];
  }
  normalize(kept);
  note_boundary(boundary_amplitude(kept));
  return {outcome, std::move(kept)};
}

namespace {
constexpr char kMagic[8] = {'C', 'V', 'N', 'L', 'M', 'O', 'D', '1'};

void check_little_endian() {
  const std::uint16_t probe = 1;
  std::uint8_t first;
  std::memcpy(&first, &probe, 1);
  if (first != 1)
    throw std::runtime_error("state container requires a little-endian host");
}
}  // namespace

void save_mode(const ModeState& s, const std::string& path) {
  check_little_endian();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f.write(kMagic, 8);
  const std::uint32_t n = static_cast<std::uint32_t>(s.grid.n);
  const double L = s.grid.L;
  f.write(reinterpret_cast<const char*>(&n), 4);
  f.write(reinterpret_cast<const char*>(&L), 8);
  for (int j = 0; j < s.grid.n; ++j) {
    const float re = static_cast<float>(s.amp[static_cast<std::size_t>(j)].real());
    const float im = static_cast<float>(s.amp[static_cast<std::size_t>(j)].imag());
    f.write(reinterpret_cast<const char*>(&re), 4);
    f.write(reinterpret_cast<const char*>(&im), 4);
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

ModeState load_mode(const std::string& path) {
  check_little_endian();
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("not a state container: " + path);
  std::uint32_t n = 0;
  double L = 0.0;
  f.read(reinterpret_cast<char*>(&n), 4);
  f.read(reinterpret_cast<char*>(&L), 8);
  GridSpec grid{static_cast<int>(n), L};
  grid.validate();
  ModeState out{grid, std::vector<cplx>(n)};
  for (std::uint32_t j = 0; j < n; ++j) {
    float re = 0.f, im = 0.f;
    f.read(reinterpret_cast<char*>(&re), 4);
    f.read(reinterpret_cast<char*>(&im), 4);
    out.amp[j] = cplx(re, im);
  }
  if (!f) throw std::runtime_error("truncated state container: " + path);
  return out;
}

}  // namespace cvnl::sim
