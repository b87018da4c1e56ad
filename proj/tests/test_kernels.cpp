#include <doctest.h>

#include <omp.h>

#include "diarkit/features.hpp"
#include "diarkit/kernels.hpp"
#include "oracles.hpp"

using namespace diarkit;
namespace k = diarkit::kernels;

// The OpenMP kernels must agree with the serial reference for every team size.

namespace {

Matrix points(std::size_t n, std::size_t d, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = rng.normal() + static_cast<double>(i % 3) * 3.0;
  return m;
}

struct ThreadCount {
  int saved = omp_get_max_threads();
  explicit ThreadCount(int n) { omp_set_num_threads(n); }
  ~ThreadCount() { omp_set_num_threads(saved); }
};

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

}  // namespace

TEST_CASE("cosine kernels") {
  const Matrix e = points(97, 16, 1);
  const Matrix ref = k::serial::cosine_similarity(e);
  const Matrix dref = k::serial::cosine_distance(e);
  for (int threads : {1, 2, 3, 8}) {
    ThreadCount tc(threads);
    CHECK(k::omp::cosine_similarity(e) == ref);
    CHECK(k::omp::cosine_distance(e) == dref);
  }
}

TEST_CASE("log-mel kernel") {
  SplitMix64 rng(2);
  std::vector<double> samples(16000);
  for (auto& s : samples) s = 0.2 * rng.normal();
  MelConfig cfg;
  const k::FrameSpec spec{cfg.win_samples(16000), cfg.hop_samples(16000), cfg.resolved_fft_size(16000), cfg.log_floor};
  const auto window = hann_window(spec.win);
  const Matrix fb = mel_filterbank_matrix(cfg, 16000);
  Matrix ref(frame_count(samples.size(), spec.win, spec.hop), fb.rows());
  k::serial::log_mel_frames(samples, spec, window, fb, ref);
  for (int threads : {1, 2, 5}) {
    ThreadCount tc(threads);
    Matrix out(ref.rows(), ref.cols());
    k::omp::log_mel_frames(samples, spec, window, fb, out);
    CHECK(out == ref);
  }
}

TEST_CASE("Jacobi orderings agree on the spectrum and are thread-count independent") {
  SplitMix64 rng(3);
  for (std::size_t n : {2u, 5u, 12u, 40u, 75u}) {
    const Matrix a = oracle::random_symmetric(n, rng);
    const auto s = k::serial::jacobi_eigen(a, JacobiOptions{});
    EigenDecomposition first;
    for (int threads : {1, 2, 4}) {
      ThreadCount tc(threads);
      const auto o = k::omp::jacobi_eigen(a, JacobiOptions{});
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o.values[i] - s.values[i]) < 1e-9);
      if (threads == 1) {
        first = o;
      } else {
        CHECK(o.values == first.values);
        CHECK(o.vectors == first.vectors);
      }
    }
  }
}

TEST_CASE("k-means restarts") {
  const Matrix p = points(150, 4, 4);
  const auto s = k::serial::kmeans(p, 3, 7, KMeansOptions{});
  for (int threads : {1, 3, 6}) {
    ThreadCount tc(threads);
    const auto o = k::omp::kmeans(p, 3, 7, KMeansOptions{});
    CHECK(o.assignment == s.assignment);
    CHECK(o.wcss == s.wcss);
    CHECK(o.restart == s.restart);
    CHECK(max_abs_diff(o.centroids, s.centroids) == 0.0);
  }
}

TEST_CASE("silhouette samples") {
  const Matrix e = points(80, 6, 5);
  const Matrix d = k::serial::cosine_distance(e);
  std::vector<int> labels(80);
  for (std::size_t i = 0; i < 80; ++i) labels[i] = static_cast<int>(i % 3);
  labels[7] = 3;  // singleton
  const auto ref = k::serial::silhouette_samples(d, labels);
  CHECK(ref[7] == 0.0);
  for (int threads : {1, 4}) {
    ThreadCount tc(threads);
    CHECK(k::omp::silhouette_samples(d, labels) == ref);
  }
}
