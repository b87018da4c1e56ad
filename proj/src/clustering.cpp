#include "diarkit/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "diarkit/error.hpp"
#include "diarkit/kernels.hpp"

namespace diarkit {

ClusterAssignment canonicalize(std::span<const int> labels) {
  ClusterAssignment out;
  out.labels.resize(labels.size());
  std::unordered_map<int, int> remap;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = remap.try_emplace(labels[i], static_cast<int>(remap.size()));
    out.labels[i] = it->second;
  }
  out.k = static_cast<int>(remap.size());
  return out;
}

Matrix cosine_similarity_matrix(const Matrix& embeddings) {
  return kernels::omp::cosine_similarity(embeddings);
}

Matrix normalized_laplacian(const Matrix& s) {
  const std::size_t n = s.rows();
  std::vector<double> inv_sqrt(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double degree = 0.0;
    for (double v : s.row(i)) degree += v;
    inv_sqrt[i] = degree > 0.0 ? 1.0 / std::sqrt(degree) : 0.0;
  }
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    l(i, i) = 1.0;
    if (inv_sqrt[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || inv_sqrt[j] == 0.0) continue;
      l(i, j) = -s(i, j) * (inv_sqrt[i] * inv_sqrt[j]);
    }
  }
  return l;
}

EigenDecomposition symmetric_eigendecomposition(const Matrix& a, const JacobiOptions& opts) {
  if (a.rows() != a.cols()) throw Error(Errc::BadParams, "eigendecomposition needs a square matrix");
  return kernels::omp::jacobi_eigen(a, opts);
}

int estimate_k_eigengap(std::span<const double> eigenvalues, int k_max) {
  const int n = static_cast<int>(eigenvalues.size());
  const int limit = std::min(k_max, n - 1);
  int best = 1;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= limit; ++i) {
    const double gap = eigenvalues[static_cast<std::size_t>(i)] - eigenvalues[static_cast<std::size_t>(i - 1)];
    if (gap > best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  return best;
}

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& opts) {
  if (k < 1 || static_cast<std::size_t>(k) > points.rows()) {
    throw Error(Errc::BadK, "k=" + std::to_string(k) + " for " + std::to_string(points.rows()) + " points");
  }
  return kernels::omp::kmeans(points, k, seed, opts);
}

SpectralTrace spectral_cluster_traced(const Matrix& embeddings, const SpectralOptions& opts) {
  const std::size_t n = embeddings.rows();
  if (n == 0) throw Error(Errc::EmptyInput, "no embeddings to cluster");
  if (opts.k_override && (*opts.k_override < 1 || static_cast<std::size_t>(*opts.k_override) > n)) {
    throw Error(Errc::BadK, "requested " + std::to_string(*opts.k_override) + " speakers for " +
                                std::to_string(n) + " subsegments");
  }

  SpectralTrace trace;
  if (n == 1) {
    trace.k = 1;
    trace.assignment = {{0}, 1};
    return trace;
  }

  trace.laplacian = normalized_laplacian(cosine_similarity_matrix(embeddings));
  trace.eigen = symmetric_eigendecomposition(trace.laplacian);
  trace.k = opts.k_override ? *opts.k_override : estimate_k_eigengap(trace.eigen.values, opts.k_max);

  const auto k = static_cast<std::size_t>(trace.k);
  Matrix spectral(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = spectral.row(i);
    for (std::size_t j = 0; j < k; ++j) row[j] = trace.eigen.vectors(i, j);
    const double norm = std::sqrt(dot(row, row));
    if (norm > 0.0) {
      for (double& v : row) v /= norm;
    }
  }
  trace.assignment = kmeans(spectral, trace.k, opts.seed, opts.kmeans).assignment;
  return trace;
}

ClusterAssignment spectral_cluster(const Matrix& embeddings, const SpectralOptions& opts) {
  return spectral_cluster_traced(embeddings, opts).assignment;
}

Matrix cosine_distance_matrix(const Matrix& embeddings) {
  return kernels::omp::cosine_distance(embeddings);
}

std::vector<Merge> average_linkage(const Matrix& distances) {
  const std::size_t n = distances.rows();
  std::vector<Merge> merges;
  if (n < 2) return merges;
  merges.reserve(n - 1);

  Matrix d = distances;
  std::vector<bool> active(n, true);
  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> nn(n, 0);
  std::vector<double> nnd(n, std::numeric_limits<double>::infinity());

  auto refresh = [&](std::size_t i) {
    nnd[i] = std::numeric_limits<double>::infinity();
    nn[i] = i;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && active[j] && d(i, j) < nnd[i]) {
        nnd[i] = d(i, j);
        nn[i] = j;
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t i = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (active[c] && (i == n || nnd[c] < nnd[i])) i = c;
    }
    const std::size_t a = std::min(i, nn[i]);
    const std::size_t b = std::max(i, nn[i]);
    merges.push_back({static_cast<int>(a), static_cast<int>(b), nnd[i]});

    const double wa = static_cast<double>(size[a]);
    const double wb = static_cast<double>(size[b]);
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == a || c == b) continue;
      const double v = (wa * d(a, c) + wb * d(b, c)) / (wa + wb);
      d(a, c) = v;
      d(c, a) = v;
    }
    size[a] += size[b];
    active[b] = false;

    refresh(a);
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == a) continue;
      if (nn[c] == a || nn[c] == b) {
        refresh(c);
      } else if (d(c, a) < nnd[c] || (d(c, a) == nnd[c] && a < nn[c])) {
        nnd[c] = d(c, a);
        nn[c] = a;
      }
    }
  }
  return merges;
}

namespace {

ClusterAssignment apply_merges(std::size_t n, std::span<const Merge> merges) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (const auto& m : merges) {
    const int ra = find(m.a);
    const int rb = find(m.b);
    if (ra != rb) parent[static_cast<std::size_t>(rb)] = ra;
  }
  std::vector<int> roots(n);
  for (std::size_t i = 0; i < n; ++i) roots[i] = find(static_cast<int>(i));
  return canonicalize(roots);
}

}  // namespace

ClusterAssignment cut_to_k(std::size_t n, std::span<const Merge> merges, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > n) throw Error(Errc::BadK, "cannot cut " + std::to_string(n) + " points into " + std::to_string(k) + " clusters");
  const std::size_t count = std::min(merges.size(), n - static_cast<std::size_t>(k));
  return apply_merges(n, merges.first(count));
}

ClusterAssignment cut_at_distance(std::size_t n, std::span<const Merge> merges, double threshold) {
  std::size_t count = 0;
  while (count < merges.size() && merges[count].distance <= threshold) ++count;
  return apply_merges(n, merges.first(count));
}

double silhouette_score(const Matrix& distances, std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  const auto samples = kernels::omp::silhouette_samples(distances, labels);
  double sum = 0.0;
  for (double s : samples) sum += s;
  return sum / static_cast<double>(samples.size());
}

ClusterAssignment ahc_cluster(const Matrix& embeddings, const AhcOptions& opts) {
  const std::size_t n = embeddings.rows();
  if (n == 0) throw Error(Errc::EmptyInput, "no embeddings to cluster");
  if (n == 1) return {{0}, 1};

  const Matrix dist = cosine_distance_matrix(embeddings);
  const auto merges = average_linkage(dist);
  if (n < 3) return cut_at_distance(n, merges, opts.distance_threshold);

  const int k_hi = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(std::max(opts.k_max, 2)), n));
  double best_score = -std::numeric_limits<double>::infinity();
  ClusterAssignment best;
  for (int k = 2; k <= k_hi; ++k) {
    ClusterAssignment candidate = cut_to_k(n, merges, k);
    const double score = silhouette_score(dist, candidate.labels);
    if (score > best_score) {
      best_score = score;
      best = std::move(candidate);
    }
  }
  if (best_score <= 0.0) return cut_at_distance(n, merges, opts.distance_threshold);
  return best;
}

}  // namespace diarkit
