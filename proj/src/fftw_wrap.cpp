#include "cvnl/fftw_wrap.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace cvnl::fft {

namespace {

std::mutex g_plan_mutex;
std::map<std::pair<int, bool>, fftw_plan>& plan_cache() {
  static std::map<std::pair<int, bool>, fftw_plan> cache;
  return cache;
}

}  // namespace

PlanHandle plan_for(int n, bool forward) {
  if (n <= 0) throw std::invalid_argument("fft length must be positive");
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_pair(n, forward);
  auto& cache = plan_cache();
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  // Plan on a throwaway buffer; FFTW_UNALIGNED lets us execute on any
  // std::vector storage later via the new-array interface.
  fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(n));
  if (!buf) throw std::runtime_error("fftw_alloc_complex failed");
  fftw_plan p = fftw_plan_dft_1d(n, buf, buf,
                                 forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  if (!p) throw std::runtime_error("fftw_plan_dft_1d failed");
  cache.emplace(key, p);
  return p;
}

void execute(PlanHandle plan, std::complex<double>* data) {
  fftw_complex* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan), d, d);
}

void dft(std::complex<double>* data, int n, bool forward) {
  execute(plan_for(n, forward), data);
}

}  // namespace cvnl::fft
