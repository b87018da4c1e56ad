#pragma once

// Independent reference implementations used to check the library. They are
// deliberately naive: frame sampling instead of interval arithmetic,
// permutation enumeration instead of the Hungarian method.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "diarkit/matrix.hpp"
#include "diarkit/rng.hpp"
#include "diarkit/timeline.hpp"

namespace oracle {

using diarkit::Interval;
using diarkit::Matrix;
using diarkit::SplitMix64;
using diarkit::Timeline;

struct FrameDer {
  double ms_pct = 0.0;
  double fa_pct = 0.0;
  double se_pct = 0.0;
  double der_pct = 0.0;
};

inline std::vector<std::string> speakers(const Timeline& t) {
  std::set<std::string> s;
  for (const auto& iv : t.intervals) s.insert(iv.label);
  return {s.begin(), s.end()};
}

// Best total weight over all injective maps from the smaller side to the
// larger one. `best` receives the chosen (row, col) pairs sorted by row.
inline double best_assignment(const Matrix& w, std::vector<std::pair<int, int>>* best = nullptr) {
  const int rows = static_cast<int>(w.rows());
  const int cols = static_cast<int>(w.cols());
  const bool by_row = rows <= cols;
  const int small = by_row ? rows : cols;
  const int large = by_row ? cols : rows;
  std::vector<int> perm(static_cast<std::size_t>(large));
  std::iota(perm.begin(), perm.end(), 0);
  double top = -1.0;
  // every permutation of the large side; the first `small` entries are the image
  do {
    double total = 0.0;
    for (int i = 0; i < small; ++i) total += by_row ? w(i, perm[i]) : w(perm[i], i);
    if (total > top + 1e-12) {
      top = total;
      if (best) {
        best->clear();
        for (int i = 0; i < small; ++i) best->push_back(by_row ? std::pair{i, perm[i]} : std::pair{perm[i], i});
        std::sort(best->begin(), best->end());
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return small == 0 ? 0.0 : top;
}

// DER on frames of `step` seconds, sampling speaker activity at frame centres.
inline FrameDer frame_der(const Timeline& ref, const Timeline& hyp, double step = 0.01) {
  const auto rs = speakers(ref);
  const auto hs = speakers(hyp);
  double lo = 1e300, hi = 0.0;
  for (const auto* t : {&ref, &hyp}) {
    for (const auto& iv : t->intervals) {
      lo = std::min(lo, iv.start);
      hi = std::max(hi, iv.end);
    }
  }
  if (lo > hi) return {};

  auto active = [](const Timeline& t, const std::vector<std::string>& names, double x) {
    std::vector<bool> on(names.size(), false);
    for (const auto& iv : t.intervals) {
      if (iv.start <= x && x < iv.end) {
        on[static_cast<std::size_t>(std::lower_bound(names.begin(), names.end(), iv.label) - names.begin())] = true;
      }
    }
    return on;
  };

  std::vector<std::vector<bool>> ref_on, hyp_on;
  const auto frames = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  Matrix overlap(rs.size(), hs.size());
  for (std::size_t f = 0; f < frames; ++f) {
    const double x = lo + (static_cast<double>(f) + 0.5) * step;
    ref_on.push_back(active(ref, rs, x));
    hyp_on.push_back(active(hyp, hs, x));
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < hs.size(); ++j)
        if (ref_on.back()[i] && hyp_on.back()[j]) overlap(i, j) += 1.0;
  }
  std::vector<std::pair<int, int>> pairs;
  if (!rs.empty() && !hs.empty()) best_assignment(overlap, &pairs);

  double ms = 0, fa = 0, se = 0, total = 0;
  for (std::size_t f = 0; f < frames; ++f) {
    const double r = static_cast<double>(std::count(ref_on[f].begin(), ref_on[f].end(), true));
    const double h = static_cast<double>(std::count(hyp_on[f].begin(), hyp_on[f].end(), true));
    double matched = 0;
    for (auto [i, j] : pairs) matched += (ref_on[f][static_cast<std::size_t>(i)] && hyp_on[f][static_cast<std::size_t>(j)]) ? 1 : 0;
    ms += std::max(0.0, r - h);
    fa += std::max(0.0, h - r);
    se += std::min(r, h) - matched;
    total += r;
  }
  if (total == 0) return {};
  FrameDer d{100 * ms / total, 100 * fa / total, 100 * se / total, 0};
  d.der_pct = d.ms_pct + d.fa_pct + d.se_pct;
  return d;
}

// Random conversation: consecutive turns by changing speakers with short
// pauses, plus occasional overlapping interjections.
inline Timeline random_timeline(SplitMix64& rng, int n_speakers, double duration, const std::string& prefix) {
  Timeline t{"f", {}};
  auto name = [&](std::uint64_t s) { return prefix + std::to_string(s); };
  const auto n = static_cast<std::uint64_t>(n_speakers);
  std::uint64_t speaker = rng.below(n);
  double x = rng.uniform(0.0, 2.0);
  while (x < duration - 0.5) {
    const double end = std::min(duration, x + rng.uniform(0.5, 8.0));
    t.intervals.push_back({x, end, name(speaker)});
    if (n > 1 && rng.uniform() < 0.2) {
      const std::uint64_t other = (speaker + 1 + rng.below(n - 1)) % n;
      const double a = rng.uniform(x, end);
      t.intervals.push_back({a, std::min(duration, a + rng.uniform(0.2, 1.5)), name(other)});
    }
    if (n > 1) speaker = (speaker + 1 + rng.below(n - 1)) % n;
    x = end + rng.uniform(0.0, 1.5);
  }
  diarkit::sort_intervals(t);
  return t;
}

// Hypothesis derived from a reference: jittered boundaries, some relabelled
// or dropped turns, and a few spurious ones.
inline Timeline perturb(const Timeline& ref, SplitMix64& rng, int n_hyp_speakers, double duration) {
  Timeline t{"f", {}};
  for (const auto& iv : ref.intervals) {
    if (rng.uniform() < 0.1) continue;
    double a = std::max(0.0, iv.start + rng.uniform(-0.3, 0.3));
    double b = std::min(duration, iv.end + rng.uniform(-0.3, 0.3));
    if (b - a < 0.05) continue;
    const std::string label = rng.uniform() < 0.2 ? "h" + std::to_string(rng.below(static_cast<std::uint64_t>(n_hyp_speakers)))
                                                   : "h" + iv.label;
    t.intervals.push_back({a, b, label});
  }
  const int extra = static_cast<int>(rng.below(4));
  for (int i = 0; i < extra; ++i) {
    const double a = rng.uniform(0.0, duration - 1.0);
    t.intervals.push_back({a, a + rng.uniform(0.1, 1.0), "h" + std::to_string(rng.below(static_cast<std::uint64_t>(n_hyp_speakers)))});
  }
  diarkit::sort_intervals(t);
  return t;
}

// Orthonormal vectors from Gram-Schmidt on Gaussian draws.
inline std::vector<std::vector<double>> orthonormal(std::size_t count, std::size_t dim, SplitMix64& rng) {
  std::vector<std::vector<double>> basis;
  while (basis.size() < count) {
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.normal();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const double d = std::inner_product(v.begin(), v.end(), b.begin(), 0.0);
        for (std::size_t i = 0; i < dim; ++i) v[i] -= d * b[i];
      }
    }
    const double n = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (n < 1e-6) continue;
    for (auto& x : v) x /= n;
    basis.push_back(std::move(v));
  }
  return basis;
}

struct PlantedBlocks {
  Matrix embeddings;
  std::vector<int> truth;
};

// `blocks` groups of `per_block` unit vectors with pairwise cosine exactly
// `within` inside a group and `across` between groups:
//   c_a = sqrt(r) u_0 + sqrt(1 - r) u_a,  r = across / within
//   e   = sqrt(within) c_a + sqrt(1 - within) n_i
// with u_*, n_* orthonormal. Rows are shuffled.
inline PlantedBlocks planted_blocks(int blocks, int per_block, double within, double across, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const auto n = static_cast<std::size_t>(blocks * per_block);
  const std::size_t dim = n + static_cast<std::size_t>(blocks) + 8;
  const auto basis = orthonormal(1 + static_cast<std::size_t>(blocks) + n, dim, rng);
  const double r = across / within;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  PlantedBlocks out{Matrix(n, dim), std::vector<int>(n)};
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t row = order[p];
    const auto b = static_cast<std::size_t>(p / static_cast<std::size_t>(per_block));
    out.truth[row] = static_cast<int>(b);
    for (std::size_t d = 0; d < dim; ++d) {
      const double centre = std::sqrt(r) * basis[0][d] + std::sqrt(1.0 - r) * basis[1 + b][d];
      out.embeddings(row, d) = std::sqrt(within) * centre + std::sqrt(1.0 - within) * basis[1 + blocks + p][d];
    }
  }
  return out;
}

// True when the labelings induce the same partition.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [it1, new1] = ab.emplace(a[i], b[i]);
    auto [it2, new2] = ba.emplace(b[i], a[i]);
    if (it1->second != b[i] || it2->second != a[i]) return false;
  }
  return true;
}

inline Matrix random_symmetric(std::size_t n, SplitMix64& rng, double scale = 1.0) {
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = scale * rng.uniform(-1.0, 1.0);
  return a;
}

// Eigenvalues by Householder reduction to tridiagonal form followed by
// Sturm-sequence bisection, ascending. Shares nothing with the Jacobi code.
inline std::vector<double> sturm_eigenvalues(Matrix a) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha += a(i, k) * a(i, k);
    alpha = std::sqrt(alpha);
    if (alpha == 0.0) continue;
    if (a(k + 1, k) > 0) alpha = -alpha;
    std::vector<double> v(n, 0.0);
    v[k + 1] = a(k + 1, k) - alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
    const double vv = std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
    if (vv == 0.0) continue;
    // A <- H A H with H = I - 2 v v^T / (v^T v)
    std::vector<double> p(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) p[i] += a(i, j) * v[j];
    for (auto& x : p) x *= 2.0 / vv;
    const double kappa = std::inner_product(v.begin(), v.end(), p.begin(), 0.0) / vv;
    for (std::size_t i = 0; i < n; ++i) p[i] -= kappa * v[i];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) -= v[i] * p[j] + p[i] * v[j];
  }
  std::vector<double> d(n), e(n, 0.0);
  double bound = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a(i, i);
    if (i + 1 < n) e[i] = a(i + 1, i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    bound = std::max(bound, std::abs(d[i]) + std::abs(e[i]) + (i ? std::abs(e[i - 1]) : 0.0));
  }
  const double tiny = 1e-300;
  auto count_below = [&](double x) {
    int count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      q = d[i] - x - (i ? e[i - 1] * e[i - 1] / q : 0.0);
      if (q == 0.0) q = -tiny;
      if (q < 0.0) ++count;
    }
    return count;
  };
  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) {
    double lo = -bound - 1.0, hi = bound + 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, bound); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (count_below(mid) > static_cast<int>(k)) hi = mid;
      else lo = mid;
    }
    values[k] = 0.5 * (lo + hi);
  }
  return values;
}

}  // namespace oracle
