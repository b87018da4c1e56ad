// Serial reference vs OpenMP kernels on pipeline-sized inputs.

#include <benchmark/benchmark.h>

#include "diarkit/features.hpp"
#include "diarkit/kernels.hpp"
#include "diarkit/rng.hpp"

namespace k = diarkit::kernels;
using diarkit::Matrix;

namespace {

Matrix random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  diarkit::SplitMix64 rng(seed);
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = rng.normal();
  return m;
}

Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
  const Matrix x = random_points(n, n, seed);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (x(i, j) + x(j, i));
  return a;
}

struct MelSetup {
  std::vector<double> samples;
  k::FrameSpec spec;
  std::vector<double> window;
  Matrix fb;
  Matrix out;

  explicit MelSetup(double seconds) {
    const int sr = 16000;
    diarkit::MelConfig cfg;
    diarkit::SplitMix64 rng(3);
    samples.resize(static_cast<std::size_t>(seconds * sr));
    for (auto& s : samples) s = 0.1 * rng.normal();
    spec = {cfg.win_samples(sr), cfg.hop_samples(sr), cfg.resolved_fft_size(sr), cfg.log_floor};
    window = diarkit::hann_window(spec.win);
    fb = diarkit::mel_filterbank_matrix(cfg, sr);
    out = Matrix(diarkit::frame_count(samples.size(), spec.win, spec.hop), static_cast<std::size_t>(cfg.n_mels));
  }
};

template <auto Fn>
void BM_cosine(benchmark::State& state) {
  const Matrix e = random_points(static_cast<std::size_t>(state.range(0)), 64, 1);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(e));
}

template <auto Fn>
void BM_log_mel(benchmark::State& state) {
  MelSetup s(static_cast<double>(state.range(0)));
  for (auto _ : state) {
    Fn(s.samples, s.spec, s.window, s.fb, s.out);
    benchmark::ClobberMemory();
  }
}

template <auto Fn>
void BM_jacobi(benchmark::State& state) {
  const Matrix a = random_symmetric(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(a, diarkit::JacobiOptions{}));
}

template <auto Fn>
void BM_kmeans(benchmark::State& state) {
  const Matrix p = random_points(static_cast<std::size_t>(state.range(0)), 4, 5);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(p, 4, 42, diarkit::KMeansOptions{}));
}

}  // namespace

BENCHMARK(BM_cosine<k::serial::cosine_similarity>)->Name("cosine/serial")->Arg(300)->Arg(1200);
BENCHMARK(BM_cosine<k::omp::cosine_similarity>)->Name("cosine/omp")->Arg(300)->Arg(1200);
BENCHMARK(BM_log_mel<k::serial::log_mel_frames>)->Name("log_mel/serial")->Arg(10)->Arg(60);
BENCHMARK(BM_log_mel<k::omp::log_mel_frames>)->Name("log_mel/omp")->Arg(10)->Arg(60);
BENCHMARK(BM_jacobi<k::serial::jacobi_eigen>)->Name("jacobi/serial")->Arg(64)->Arg(200);
BENCHMARK(BM_jacobi<k::omp::jacobi_eigen>)->Name("jacobi/omp")->Arg(64)->Arg(200);
BENCHMARK(BM_kmeans<k::serial::kmeans>)->Name("kmeans/serial")->Arg(300)->Arg(1200);
BENCHMARK(BM_kmeans<k::omp::kmeans>)->Name("kmeans/omp")->Arg(300)->Arg(1200);

BENCHMARK_MAIN();
