#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include "diarkit/error.hpp"
#include "diarkit/features.hpp"
#include "diarkit/kernels.hpp"
#include "diarkit/rng.hpp"

namespace diarkit::kernels {

// --- shared pieces ----------------------------------------------------------

namespace detail {

std::vector<std::pair<std::size_t, std::size_t>> filter_support(const Matrix& filterbank) {
  std::vector<std::pair<std::size_t, std::size_t>> support(filterbank.rows());
  for (std::size_t m = 0; m < filterbank.rows(); ++m) {
    const auto row = filterbank.row(m);
    std::size_t first = row.size();
    std::size_t last = 0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] != 0.0) {
        first = std::min(first, k);
        last = k + 1;
      }
    }
    support[m] = first < last ? std::pair{first, last} : std::pair{std::size_t{0}, std::size_t{0}};
  }
  return support;
}

void log_mel_frame(std::span<const double> samples, std::size_t t, const FrameSpec& spec,
                   std::span<const double> window, const Matrix& filterbank,
                   std::span<const std::pair<std::size_t, std::size_t>> support,
                   std::span<std::complex<double>> scratch, std::span<double> out_row) {
  const std::size_t offset = t * spec.hop;
  for (std::size_t i = 0; i < spec.win; ++i) scratch[i] = {samples[offset + i] * window[i], 0.0};
  for (std::size_t i = spec.win; i < spec.fft_size; ++i) scratch[i] = {0.0, 0.0};
  fft_inplace(scratch);
  // |X_k|^2 overwrites the real part of the first half.
  const std::size_t bins = spec.fft_size / 2 + 1;
  for (std::size_t k = 0; k < bins; ++k) scratch[k] = {std::norm(scratch[k]), 0.0};
  for (std::size_t m = 0; m < filterbank.rows(); ++m) {
    const auto row = filterbank.row(m);
    double energy = 0.0;
    for (std::size_t k = support[m].first; k < support[m].second; ++k) energy += row[k] * scratch[k].real();
    out_row[m] = std::log(std::max(energy, spec.log_floor));
  }
}

std::pair<double, double> jacobi_rotation(double app, double aqq, double apq) noexcept {
  const double tau = (aqq - app) / (2.0 * apq);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  return {c, t * c};
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double max_offdiag(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) m = std::max(m, std::abs(a(i, j)));
    }
  }
  return m;
}

void sort_eigenpairs(EigenDecomposition& eig) {
  const std::size_t n = eig.values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eig.values[a] < eig.values[b]; });
  std::vector<double> values(n);
  Matrix vectors(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    values[j] = eig.values[order[j]];
    for (std::size_t i = 0; i < n; ++i) vectors(i, j) = eig.vectors(i, order[j]);
  }
  eig.values = std::move(values);
  eig.vectors = std::move(vectors);
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Nearest centroid, smallest index on ties.
std::pair<int, double> nearest(std::span<const double> x, const Matrix& centroids) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const double d = squared_distance(x, centroids.row(c));
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return {best, best_d};
}

Matrix seed_plus_plus(const Matrix& points, int k, SplitMix64& rng) {
  const std::size_t n = points.rows();
  Matrix centroids(static_cast<std::size_t>(k), points.cols());
  auto copy_row = [&](std::size_t c, std::size_t i) {
    std::copy(points.row(i).begin(), points.row(i).end(), centroids.row(c).begin());
  };
  const std::size_t first = rng.below(n);
  copy_row(0, first);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points.row(i), centroids.row(0));

  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double cum = 0.0;
      pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        cum += d2[i];
        if (cum > r) {
          pick = i;
          break;
        }
      }
      if (pick == n) {  // rounding left r just past the last positive weight
        for (std::size_t i = n; i-- > 0;) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      pick = rng.below(n);
    }
    copy_row(static_cast<std::size_t>(c), pick);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points.row(i), centroids.row(static_cast<std::size_t>(c))));
    }
  }
  return centroids;
}

}  // namespace

KMeansRun kmeans_single(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& opts) {
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();
  const auto kk = static_cast<std::size_t>(k);
  SplitMix64 rng(seed);

  KMeansRun run;
  run.centroids = seed_plus_plus(points, k, rng);
  run.labels.assign(n, 0);
  std::vector<double> dist(n);

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto [label, d] = nearest(points.row(i), run.centroids);
      run.labels[i] = label;
      dist[i] = d;
      wcss += d;
    }

    std::vector<std::size_t> counts(kk, 0);
    for (int label : run.labels) ++counts[static_cast<std::size_t>(label)];
    // Empty clusters take the point farthest from its centroid.
    for (std::size_t c = 0; c < kk; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[static_cast<std::size_t>(run.labels[i])] < 2) continue;
        if (far == n || dist[i] > dist[far]) far = i;
      }
      if (far == n) break;
      --counts[static_cast<std::size_t>(run.labels[far])];
      wcss -= dist[far];
      run.labels[far] = static_cast<int>(c);
      dist[far] = 0.0;
      ++counts[c];
    }
    run.trace.push_back(wcss);

    Matrix updated(kk, dim);
    for (std::size_t i = 0; i < n; ++i) {
      auto dst = updated.row(static_cast<std::size_t>(run.labels[i]));
      const auto src = points.row(i);
      for (std::size_t j = 0; j < dim; ++j) dst[j] += src[j];
    }
    double movement = 0.0;
    for (std::size_t c = 0; c < kk; ++c) {
      auto row = updated.row(c);
      if (counts[c] == 0) {
        std::copy(run.centroids.row(c).begin(), run.centroids.row(c).end(), row.begin());
      } else {
        for (double& v : row) v /= static_cast<double>(counts[c]);
      }
      movement = std::max(movement, std::sqrt(squared_distance(row, run.centroids.row(c))));
    }
    run.centroids = std::move(updated);
    if (movement < opts.tol) break;
  }

  run.wcss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    run.wcss += squared_distance(points.row(i), run.centroids.row(static_cast<std::size_t>(run.labels[i])));
  }
  return run;
}

KMeansResult pick_best(std::vector<KMeansRun>& runs) {
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].wcss < runs[best].wcss) best = r;
  }
  KMeansRun& run = runs[best];
  KMeansResult out;
  out.assignment = canonicalize(run.labels);
  out.restart = static_cast<int>(best);
  out.wcss = run.wcss;
  out.wcss_trace = std::move(run.trace);

  // Reorder centroid rows to match the canonical labels.
  const std::size_t k = run.centroids.rows();
  out.centroids = Matrix(k, run.centroids.cols());
  std::vector<bool> placed(k, false);
  for (std::size_t i = 0; i < run.labels.size(); ++i) {
    const auto from = static_cast<std::size_t>(run.labels[i]);
    const auto to = static_cast<std::size_t>(out.assignment.labels[i]);
    if (!placed[to]) {
      std::copy(run.centroids.row(from).begin(), run.centroids.row(from).end(), out.centroids.row(to).begin());
      placed[to] = true;
    }
  }
  return out;
}

double silhouette_of(const Matrix& distances, std::span<const int> labels,
                     std::span<const std::size_t> sizes, std::size_t i) {
  const auto own = static_cast<std::size_t>(labels[i]);
  if (sizes[own] < 2) return 0.0;
  std::vector<double> sums(sizes.size(), 0.0);
  const auto row = distances.row(i);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (j != i) sums[static_cast<std::size_t>(labels[j])] += row[j];
  }
  const double a = sums[own] / static_cast<double>(sizes[own] - 1);
  double b = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    if (c != own && sizes[c] > 0) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
  }
  if (!std::isfinite(b)) return 0.0;
  const double denom = std::max(a, b);
  return denom > 0.0 ? (b - a) / denom : 0.0;
}

std::vector<std::size_t> cluster_sizes(std::span<const int> labels) {
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

}  // namespace detail

// --- serial reference kernels ---------------------------------------------

namespace serial {

Matrix cosine_similarity(const Matrix& e) {
  const std::size_t n = e.rows();
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::max(0.0, dot(e.row(i), e.row(j)));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

Matrix cosine_distance(const Matrix& e) {
  const std::size_t n = e.rows();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 1.0 - dot(e.row(i), e.row(j));
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

void log_mel_frames(std::span<const double> samples, const FrameSpec& spec,
                    std::span<const double> window, const Matrix& filterbank, Matrix& out) {
  const auto support = detail::filter_support(filterbank);
  std::vector<std::complex<double>> scratch(spec.fft_size);
  for (std::size_t t = 0; t < out.rows(); ++t) {
    detail::log_mel_frame(samples, t, spec, window, filterbank, support, scratch, out.row(t));
  }
}

EigenDecomposition jacobi_eigen(const Matrix& input, const JacobiOptions& opts) {
  const std::size_t n = input.rows();
  Matrix a = input;
  EigenDecomposition eig;
  eig.vectors = Matrix::identity(n);
  const double threshold = opts.rel_tol * detail::frobenius_norm(a);

  int sweep = 0;
  for (; detail::max_offdiag(a) > threshold; ++sweep) {
    if (sweep == opts.max_sweeps) {
      throw Error(Errc::NoConvergence, "Jacobi did not converge in " + std::to_string(opts.max_sweeps) +
                                           " sweeps; max off-diagonal " +
                                           std::to_string(detail::max_offdiag(a)));
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const auto [c, s] = detail::jacobi_rotation(a(p, p), a(q, q), apq);
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = eig.vectors(k, p);
          const double vkq = eig.vectors(k, q);
          eig.vectors(k, p) = c * vkp - s * vkq;
          eig.vectors(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  eig.sweeps = sweep;
  eig.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) eig.values[i] = a(i, i);
  detail::sort_eigenpairs(eig);
  return eig;
}

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& opts) {
  std::vector<detail::KMeansRun> runs;
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    runs.push_back(detail::kmeans_single(points, k, derive_seed(seed, static_cast<std::uint64_t>(r)), opts));
  }
  return detail::pick_best(runs);
}

std::vector<double> silhouette_samples(const Matrix& distances, std::span<const int> labels) {
  const auto sizes = detail::cluster_sizes(labels);
  std::vector<double> s(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) s[i] = detail::silhouette_of(distances, labels, sizes, i);
  return s;
}

}  // namespace serial

}  // namespace diarkit::kernels
