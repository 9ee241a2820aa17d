// Timing harness for the array kernels: serial reference vs OpenMP, same
// inputs, with a bitwise-equality check on every output. Usage:
//   bench_kernels [rows] [cols] [reps]
#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "cvnl/kernels.hpp"
#include "cvnl/rng.hpp"

using cvnl::kernels::cplx;
namespace kn = cvnl::kernels;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

std::vector<cplx> random_matrix(int rows, int cols, std::uint64_t seed) {
  cvnl::rng::SplitMix64 gen{seed};
  std::vector<cplx> m((std::size_t)rows * cols);
  for (auto& v : m) v = {2.0 * gen.uniform() - 1.0, 2.0 * gen.uniform() - 1.0};
  return m;
}

bool bitwise_equal(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0;
}

struct Row {
  const char* name;
  double t_serial = 0.0, t_par = 0.0;
  bool match = true;
};

template <class Fs, class Fp>
Row bench(const char* name, int reps, const std::vector<cplx>& input, Fs fs,
          Fp fp) {
  Row row;
  row.name = name;
  std::vector<cplx> a, b;
  for (int r = 0; r < reps; ++r) {
    a = input;
    double t0 = now_ms();
    fs(a);
    row.t_serial += now_ms() - t0;
    b = input;
    t0 = now_ms();
    fp(b);
    row.t_par += now_ms() - t0;
    if (!bitwise_equal(a, b)) row.match = false;
  }
  row.t_serial /= reps;
  row.t_par /= reps;
  return row;
}

}  // namespace

int main(int argc, char** argv) {
  int rows = argc > 1 ? std::atoi(argv[1]) : 512;
  int cols = argc > 2 ? std::atoi(argv[2]) : 512;
  int reps = argc > 3 ? std::atoi(argv[3]) : 20;
  const int n = rows * cols;

  std::vector<cplx> m = random_matrix(rows, cols, 42);
  std::vector<double> rv(rows), cv(cols), c = {0.1, 0.3, -0.2, 0.05, 0.01};
  cvnl::rng::SplitMix64 gen{7};
  for (auto& v : rv) v = 2.0 * gen.uniform() - 1.0;
  for (auto& v : cv) v = 2.0 * gen.uniform() - 1.0;
  std::vector<cplx> f = random_matrix(1, cols, 11);

  std::printf("kernel benchmark: %d x %d, %d reps, %d threads\n", rows, cols,
              reps, kn::max_threads());
  std::printf("%-14s %12s %12s %8s %s\n", "kernel", "serial ms", "par ms",
              "speedup", "bitwise");

  std::vector<Row> table;
  table.push_back(bench(
      "phase_poly", reps, m,
      [&](std::vector<cplx>& a) {
        kn::serial::phase_poly(a.data(), n, -8.0, 16.0 / n, c.data(), 4);
      },
      [&](std::vector<cplx>& a) {
        kn::par::phase_poly(a.data(), n, -8.0, 16.0 / n, c.data(), 4);
      }));
  table.push_back(bench(
      "mul_outer", reps, m,
      [&](std::vector<cplx>& a) {
        kn::serial::mul_outer(a.data(), rows, cols, rv.data(), cv.data());
      },
      [&](std::vector<cplx>& a) {
        kn::par::mul_outer(a.data(), rows, cols, rv.data(), cv.data());
      }));
  table.push_back(bench(
      "mul_cols", reps, m,
      [&](std::vector<cplx>& a) {
        kn::serial::mul_cols(a.data(), rows, cols, f.data());
      },
      [&](std::vector<cplx>& a) {
        kn::par::mul_cols(a.data(), rows, cols, f.data());
      }));
  table.push_back(bench(
      "dft_rows", reps, m,
      [&](std::vector<cplx>& a) {
        kn::serial::dft_rows(a.data(), rows, cols, true);
      },
      [&](std::vector<cplx>& a) {
        kn::par::dft_rows(a.data(), rows, cols, true);
      }));

  // reductions and projections compare their scalar/vector results bytewise
  Row red;
  red.name = "abs2_sum";
  for (int r = 0; r < reps; ++r) {
    double t0 = now_ms();
    double s1 = kn::serial::abs2_sum(m.data(), n);
    red.t_serial += now_ms() - t0;
    t0 = now_ms();
    double s2 = kn::par::abs2_sum(m.data(), n);
    red.t_par += now_ms() - t0;
    if (std::memcmp(&s1, &s2, sizeof s1) != 0) red.match = false;
  }
  red.t_serial /= reps;
  red.t_par /= reps;
  table.push_back(red);

  Row proj;
  proj.name = "abs2_cols";
  {
    std::vector<double> o1(cols), o2(cols);
    for (int r = 0; r < reps; ++r) {
      double t0 = now_ms();
      kn::serial::abs2_cols(m.data(), rows, cols, o1.data());
      proj.t_serial += now_ms() - t0;
      t0 = now_ms();
      kn::par::abs2_cols(m.data(), rows, cols, o2.data());
      proj.t_par += now_ms() - t0;
      if (std::memcmp(o1.data(), o2.data(), cols * sizeof(double)) != 0)
        proj.match = false;
    }
    proj.t_serial /= reps;
    proj.t_par /= reps;
  }
  table.push_back(proj);

  Row mm;
  mm.name = "matmul_realT";
  {
    const int oc = cols / 2;
    std::vector<double> D((std::size_t)oc * cols);
    for (auto& v : D) v = 2.0 * gen.uniform() - 1.0;
    std::vector<cplx> o1((std::size_t)rows * oc), o2(o1.size());
    int mmreps = reps / 4 + 1;
    for (int r = 0; r < mmreps; ++r) {
      double t0 = now_ms();
      kn::serial::matmul_realT(m.data(), D.data(), o1.data(), rows, cols, oc);
      mm.t_serial += now_ms() - t0;
      t0 = now_ms();
      kn::par::matmul_realT(m.data(), D.data(), o2.data(), rows, cols, oc);
      mm.t_par += now_ms() - t0;
      if (std::memcmp(o1.data(), o2.data(), o1.size() * sizeof(cplx)) != 0)
        mm.match = false;
    }
    mm.t_serial /= mmreps;
    mm.t_par /= mmreps;
  }
  table.push_back(mm);

  bool all_match = true;
  for (const auto& row : table) {
    std::printf("%-14s %12.3f %12.3f %7.2fx %s\n", row.name, row.t_serial,
                row.t_par, row.t_serial / (row.t_par > 0 ? row.t_par : 1e-9),
                row.match ? "ok" : "MISMATCH");
    all_match = all_match && row.match;
  }
  if (!all_match) {
    std::printf("serial and parallel kernels disagree\n");
    return 1;
  }
  return 0;
}
