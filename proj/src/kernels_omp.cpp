#include <algorithm>
#include <complex>
#include <string>

#include "diarkit/error.hpp"
#include "diarkit/kernels.hpp"
#include "diarkit/rng.hpp"

namespace diarkit::kernels::omp {

namespace {

// Below this many rows the parallel regions are skipped; the arithmetic is
// identical either way.
constexpr std::size_t kParallelRows = 48;

}  // namespace

Matrix cosine_similarity(const Matrix& e) {
  const auto n = static_cast<std::ptrdiff_t>(e.rows());
  Matrix s(e.rows(), e.rows());
#pragma omp parallel for schedule(dynamic, 8) if (e.rows() >= kParallelRows)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = i + 1; j < n; ++j) {
      const double v = std::max(0.0, dot(e.row(i), e.row(j)));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

Matrix cosine_distance(const Matrix& e) {
  const auto n = static_cast<std::ptrdiff_t>(e.rows());
  Matrix d(e.rows(), e.rows());
#pragma omp parallel for schedule(dynamic, 8) if (e.rows() >= kParallelRows)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = i + 1; j < n; ++j) {
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
  const auto frames = static_cast<std::ptrdiff_t>(out.rows());
#pragma omp parallel if (out.rows() >= kParallelRows)
  {
    std::vector<std::complex<double>> scratch(spec.fft_size);
#pragma omp for schedule(static)
    for (std::ptrdiff_t t = 0; t < frames; ++t) {
      detail::log_mel_frame(samples, static_cast<std::size_t>(t), spec, window, filterbank, support,
                            scratch, out.row(static_cast<std::size_t>(t)));
    }
  }
}

namespace {

// Circle-method schedule: round r pairs slot i with slot m-1-i after
// rotating every slot but the first. Pairs touching the padding index
// (== n for odd n) are dropped.
std::vector<std::pair<std::size_t, std::size_t>> tournament_round(std::size_t n, std::size_t round) {
  const std::size_t m = n + (n & 1U);
  std::vector<std::size_t> slots(m);
  slots[0] = 0;
  for (std::size_t i = 1; i < m; ++i) slots[i] = 1 + (i - 1 + round) % (m - 1);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(m / 2);
  for (std::size_t i = 0; i < m / 2; ++i) {
    std::size_t p = slots[i];
    std::size_t q = slots[m - 1 - i];
    if (p >= n || q >= n) continue;
    if (p > q) std::swap(p, q);
    pairs.emplace_back(p, q);
  }
  return pairs;
}

}  // namespace

EigenDecomposition jacobi_eigen(const Matrix& input, const JacobiOptions& opts) {
  const std::size_t n = input.rows();
  Matrix a = input;
  EigenDecomposition eig;
  eig.vectors = Matrix::identity(n);
  Matrix& v = eig.vectors;
  const double threshold = opts.rel_tol * detail::frobenius_norm(a);

  const std::size_t rounds = n < 2 ? 0 : n + (n & 1U) - 1;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> schedule(rounds);
  for (std::size_t r = 0; r < rounds; ++r) schedule[r] = tournament_round(n, r);

  std::vector<double> cs(n), sn(n);
  const auto rows = static_cast<std::ptrdiff_t>(n);

  int sweep = 0;
  for (; detail::max_offdiag(a) > threshold; ++sweep) {
    if (sweep == opts.max_sweeps) {
      throw Error(Errc::NoConvergence, "Jacobi did not converge in " + std::to_string(opts.max_sweeps) +
                                           " sweeps; max off-diagonal " +
                                           std::to_string(detail::max_offdiag(a)));
    }
#pragma omp parallel if (n >= kParallelRows)
    for (std::size_t r = 0; r < rounds; ++r) {
      const auto& pairs = schedule[r];
      const auto npairs = static_cast<std::ptrdiff_t>(pairs.size());

#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < npairs; ++i) {
        const auto [p, q] = pairs[static_cast<std::size_t>(i)];
        const double apq = a(p, q);
        if (apq == 0.0) {
          cs[static_cast<std::size_t>(i)] = 1.0;
          sn[static_cast<std::size_t>(i)] = 0.0;
        } else {
          const auto [c, s] = detail::jacobi_rotation(a(p, p), a(q, q), apq);
          cs[static_cast<std::size_t>(i)] = c;
          sn[static_cast<std::size_t>(i)] = s;
        }
      }

      // A <- A J: every pair touches its own two columns of each row.
#pragma omp for schedule(static)
      for (std::ptrdiff_t k = 0; k < rows; ++k) {
        auto row = a.row(static_cast<std::size_t>(k));
        auto vrow = v.row(static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          const auto [p, q] = pairs[i];
          const double c = cs[i];
          const double s = sn[i];
          const double kp = row[p];
          const double kq = row[q];
          row[p] = c * kp - s * kq;
          row[q] = s * kp + c * kq;
          const double vp = vrow[p];
          const double vq = vrow[q];
          vrow[p] = c * vp - s * vq;
          vrow[q] = s * vp + c * vq;
        }
      }

      // A <- J^T A: pairs own disjoint row pairs.
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < npairs; ++i) {
        const auto [p, q] = pairs[static_cast<std::size_t>(i)];
        const double c = cs[static_cast<std::size_t>(i)];
        const double s = sn[static_cast<std::size_t>(i)];
        auto rp = a.row(p);
        auto rq = a.row(q);
        for (std::size_t k = 0; k < n; ++k) {
          const double pk = rp[k];
          const double qk = rq[k];
          rp[k] = c * pk - s * qk;
          rq[k] = s * pk + c * qk;
        }
        rp[q] = 0.0;
        rq[p] = 0.0;
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
  const int restarts = std::max(1, opts.restarts);
  std::vector<detail::KMeansRun> runs(static_cast<std::size_t>(restarts));
#pragma omp parallel for schedule(dynamic, 1) if (points.rows() >= kParallelRows)
  for (int r = 0; r < restarts; ++r) {
    runs[static_cast<std::size_t>(r)] =
        detail::kmeans_single(points, k, derive_seed(seed, static_cast<std::uint64_t>(r)), opts);
  }
  return detail::pick_best(runs);
}

std::vector<double> silhouette_samples(const Matrix& distances, std::span<const int> labels) {
  const auto sizes = detail::cluster_sizes(labels);
  std::vector<double> s(labels.size());
  const auto n = static_cast<std::ptrdiff_t>(labels.size());
#pragma omp parallel for schedule(static) if (labels.size() >= kParallelRows)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    s[static_cast<std::size_t>(i)] = detail::silhouette_of(distances, labels, sizes, static_cast<std::size_t>(i));
  }
  return s;
}

}  // namespace diarkit::kernels::omp
