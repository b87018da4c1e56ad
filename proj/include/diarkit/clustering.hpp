#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "diarkit/matrix.hpp"

namespace diarkit {

/// Labels 0..k-1, one per subsegment; every label in range is used.
struct ClusterAssignment {
  std::vector<int> labels;
  int k = 0;

  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

/// Renumbers labels in order of first appearance so equal partitions compare
/// equal regardless of the ids an algorithm happened to produce.
ClusterAssignment canonicalize(std::span<const int> labels);

// --- spectral clustering stages -------------------------------------------

/// s[i][j] = max(0, <e_i, e_j>) off the diagonal, 0 on it. Rows of
/// `embeddings` are expected to be unit-norm.
Matrix cosine_similarity_matrix(const Matrix& embeddings);

enum class LaplacianKind { NormalizedSymmetric };

/// L = I - D^-1/2 S D^-1/2. Isolated nodes (zero degree) get L[i][i] = 1.
Matrix normalized_laplacian(const Matrix& similarity);

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j pairs with values[j]
  int sweeps = 0;
};

struct JacobiOptions {
  double rel_tol = 1e-12;  // stop when max |offdiag| <= rel_tol * ||A||_F
  int max_sweeps = 100;
};

/// Cyclic Jacobi eigensolver for a real symmetric matrix. Throws
/// NoConvergence (with the residual off-diagonal in the message) if the sweep
/// cap is reached.
EigenDecomposition symmetric_eigendecomposition(const Matrix& a, const JacobiOptions& opts = {});

/// Largest gap between consecutive ascending eigenvalues, searched over
/// i in 1..min(k_max, n-1) (1-based); ties go to the smaller i.
int estimate_k_eigengap(std::span<const double> eigenvalues, int k_max = 8);

struct KMeansOptions {
  int restarts = 10;
  int max_iter = 300;
  double tol = 1e-6;
};

struct KMeansResult {
  ClusterAssignment assignment;
  Matrix centroids;  // row c belongs to canonical label c
  double wcss = 0.0;
  int restart = 0;                // index of the winning restart
  std::vector<double> wcss_trace; // objective after each assignment step of the winner
};

/// k-means++ seeding, Lloyd iterations, best of `restarts` by within-cluster
/// sum of squares. Throws BadK unless 1 <= k <= n.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& opts = {});

struct SpectralOptions {
  std::optional<int> k_override;
  int k_max = 8;
  std::uint64_t seed = 42;
  KMeansOptions kmeans;
};

/// Affinity -> Laplacian -> eigenvectors -> k (override or eigengap) ->
/// row-normalised spectral embedding -> k-means.
ClusterAssignment spectral_cluster(const Matrix& embeddings, const SpectralOptions& opts = {});

/// Intermediate products of spectral_cluster, exposed for diagnostics.
struct SpectralTrace {
  Matrix laplacian;
  EigenDecomposition eigen;
  int k = 0;
  ClusterAssignment assignment;
};
SpectralTrace spectral_cluster_traced(const Matrix& embeddings, const SpectralOptions& opts = {});

// --- agglomerative baseline -----------------------------------------------

/// 1 - <e_i, e_j>, zero diagonal.
Matrix cosine_distance_matrix(const Matrix& embeddings);

struct Merge {
  int a = 0;  // surviving cluster slot
  int b = 0;  // absorbed cluster slot
  double distance = 0.0;
};

/// Average-linkage merge sequence (n-1 merges, non-decreasing distances).
/// Ties resolve to the smallest (a, b) pair.
std::vector<Merge> average_linkage(const Matrix& distances);

/// Partition after applying the first n-k merges.
ClusterAssignment cut_to_k(std::size_t n, std::span<const Merge> merges, int k);
/// Partition after applying every merge with distance <= threshold.
ClusterAssignment cut_at_distance(std::size_t n, std::span<const Merge> merges, double threshold);

/// Mean silhouette over all points; singleton clusters contribute 0.
double silhouette_score(const Matrix& distances, std::span<const int> labels);

struct AhcOptions {
  double distance_threshold = 0.5;
  int k_max = 8;
};

/// Average-linkage AHC on cosine distance. The partition with the best
/// silhouette over k in 2..min(k_max, n) wins; when n < 3 or no candidate
/// scores above zero the dendrogram is cut at `distance_threshold` instead.
ClusterAssignment ahc_cluster(const Matrix& embeddings, const AhcOptions& opts = {});

}  // namespace diarkit
