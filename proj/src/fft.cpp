#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "diarkit/error.hpp"
#include "diarkit/features.hpp"

namespace diarkit {
namespace {

// FFTW planning is not thread-safe, execution is. Plans are made once per
// size and shared; FFTW_UNALIGNED keeps results independent of where the
// caller's buffer happens to live.
fftw_plan plan_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, fftw_plan> plans;
  std::lock_guard lock(mutex);
  auto it = plans.find(n);
  if (it != plans.end()) return it->second;
  std::vector<std::complex<double>> probe(n);
  auto* buf = reinterpret_cast<fftw_complex*>(probe.data());
  fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw Error(Errc::BadParams, "FFTW could not plan a transform of size " + std::to_string(n));
  plans.emplace(n, p);
  return p;
}

}  // namespace

void fft_inplace(std::span<std::complex<double>> data) {
  if (data.size() <= 1) return;
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_for(data.size()), buf, buf);
}

}  // namespace diarkit
