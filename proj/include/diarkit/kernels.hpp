#pragma once

// Data-parallel kernels. Each has a plain serial reference in
// `kernels::serial` and an OpenMP version in `kernels::omp` with the same
// contract. The OpenMP versions never reduce across threads in a
// thread-dependent order, so their results do not depend on the team size.
// The library uses the omp variants; the serial ones are kept for tests and
// benchmarks.

#include <complex>
#include <cstdint>
#include <utility>
#include <span>
#include <vector>

#include "diarkit/clustering.hpp"
#include "diarkit/matrix.hpp"

namespace diarkit::kernels {

/// Framing of a signal for the log-mel kernel.
struct FrameSpec {
  std::size_t win = 0;
  std::size_t hop = 0;
  std::size_t fft_size = 0;
  double log_floor = 1e-10;
};

namespace serial {

Matrix cosine_similarity(const Matrix& embeddings);
Matrix cosine_distance(const Matrix& embeddings);

/// Writes T x n_mels log energies into `out` (pre-sized).
void log_mel_frames(std::span<const double> samples, const FrameSpec& spec,
                    std::span<const double> window, const Matrix& filterbank, Matrix& out);

/// Row-by-row cyclic ordering: (0,1), (0,2), ..., (n-2,n-1).
EigenDecomposition jacobi_eigen(const Matrix& a, const JacobiOptions& opts);

/// Runs every restart in sequence and keeps the best.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& opts);

std::vector<double> silhouette_samples(const Matrix& distances, std::span<const int> labels);

}  // namespace serial

namespace omp {

Matrix cosine_similarity(const Matrix& embeddings);
Matrix cosine_distance(const Matrix& embeddings);

void log_mel_frames(std::span<const double> samples, const FrameSpec& spec,
                    std::span<const double> window, const Matrix& filterbank, Matrix& out);

/// Round-robin (tournament) cyclic ordering: each sweep is n-1 rounds of
/// n/2 disjoint rotations that are applied concurrently.
EigenDecomposition jacobi_eigen(const Matrix& a, const JacobiOptions& opts);

/// Restarts run concurrently; the winner is chosen in restart order.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& opts);

std::vector<double> silhouette_samples(const Matrix& distances, std::span<const int> labels);

}  // namespace omp

// Pieces shared by both variants.
namespace detail {

struct KMeansRun {
  std::vector<int> labels;
  Matrix centroids;
  double wcss = 0.0;
  std::vector<double> trace;
};

/// One seeded k-means++ + Lloyd run.
KMeansRun kmeans_single(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& opts);

/// Picks the lowest-WCSS run (first on ties) and canonicalises its labels.
KMeansResult pick_best(std::vector<KMeansRun>& runs);

/// Non-zero column range [first, last) of each filterbank row.
std::vector<std::pair<std::size_t, std::size_t>> filter_support(const Matrix& filterbank);

/// Log-mel energies of frame t; `scratch` must hold spec.fft_size values.
void log_mel_frame(std::span<const double> samples, std::size_t t, const FrameSpec& spec,
                   std::span<const double> window, const Matrix& filterbank,
                   std::span<const std::pair<std::size_t, std::size_t>> support,
                   std::span<std::complex<double>> scratch, std::span<double> out_row);

/// Rotation (c, s) that zeroes a[p][q] in J^T A J.
std::pair<double, double> jacobi_rotation(double app, double aqq, double apq) noexcept;

double silhouette_of(const Matrix& distances, std::span<const int> labels,
                     std::span<const std::size_t> sizes, std::size_t i);

std::vector<std::size_t> cluster_sizes(std::span<const int> labels);

void sort_eigenpairs(EigenDecomposition& eig);

double frobenius_norm(const Matrix& a);
double max_offdiag(const Matrix& a);

}  // namespace detail

}  // namespace diarkit::kernels
