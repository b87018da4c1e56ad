#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "diarkit/clustering.hpp"
#include "diarkit/error.hpp"
#include "oracles.hpp"

using namespace diarkit;

namespace {

Matrix rows_of(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix permute_rows(const Matrix& m, const std::vector<std::size_t>& perm) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(perm[i], j);
  return out;
}

}  // namespace

TEST_CASE("cosine similarity clamps negatives") {
  const Matrix s = cosine_similarity_matrix(rows_of({{1, 0}, {1, 0}, {0, 1}, {-1, 0}}));
  CHECK(s(0, 1) == doctest::Approx(1.0));
  CHECK(s(0, 2) == doctest::Approx(0.0));
  CHECK(s(0, 3) == 0.0);
  CHECK(s(2, 2) == 0.0);
  CHECK(s(1, 0) == s(0, 1));
}

TEST_CASE("normalised Laplacian by hand") {
  const Matrix z(3, 3);
  CHECK(normalized_laplacian(z) == Matrix::identity(3));

  const Matrix l = normalized_laplacian(rows_of({{0, 1}, {1, 0}}));
  CHECK(l(0, 0) == doctest::Approx(1.0));
  CHECK(l(0, 1) == doctest::Approx(-1.0));
  const auto eig = symmetric_eigendecomposition(l);
  CHECK(eig.values[0] == doctest::Approx(0.0));
  CHECK(eig.values[1] == doctest::Approx(2.0));
}

TEST_CASE("two connected blocks give a double zero eigenvalue") {
  Matrix s(6, 6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      if (i != j && (i < 3) == (j < 3)) s(i, j) = 0.8;
  const auto eig = symmetric_eigendecomposition(normalized_laplacian(s));
  CHECK(std::abs(eig.values[0]) < 1e-10);
  CHECK(std::abs(eig.values[1]) < 1e-10);
  CHECK(eig.values[2] > 0.5);
}

TEST_CASE("Laplacian spectrum lies in [0, 2]") {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix e(10, 5);
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 5; ++j) e(i, j) = rng.normal();
    for (double v : symmetric_eigendecomposition(normalized_laplacian(cosine_similarity_matrix(e))).values) {
      CHECK(v >= -1e-8);
      CHECK(v <= 2.0 + 1e-8);
    }
  }
}

TEST_CASE("eigendecomposition small cases") {
  const auto d = symmetric_eigendecomposition(rows_of({{3, 0, 0}, {0, 1, 0}, {0, 0, 2}}));
  CHECK(d.values == std::vector<double>{1, 2, 3});
  CHECK(std::abs(d.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(d.vectors(2, 1)) == doctest::Approx(1.0));
  CHECK(std::abs(d.vectors(0, 2)) == doctest::Approx(1.0));

  const auto p = symmetric_eigendecomposition(rows_of({{1, -1}, {-1, 1}}));
  CHECK(p.values[0] == doctest::Approx(0.0));
  CHECK(p.values[1] == doctest::Approx(2.0));
}

TEST_CASE("eigendecomposition against Sturm bisection, with orthonormal vectors") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.below(11);
    const Matrix a = oracle::random_symmetric(n, rng);
    const auto eig = symmetric_eigendecomposition(a);
    const auto ref = oracle::sturm_eigenvalues(a);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(eig.values[i] - ref[i]) < 1e-8);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double dot = 0;
        for (std::size_t k = 0; k < n; ++k) dot += eig.vectors(k, i) * eig.vectors(k, j);
        CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-9);
      }
  }
}

TEST_CASE("sweep cap raises NoConvergence") {
  SplitMix64 rng(2);
  const Matrix a = oracle::random_symmetric(8, rng);
  try {
    symmetric_eigendecomposition(a, JacobiOptions{1e-12, 1});
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoConvergence);
  }
}

TEST_CASE("eigengap estimates") {
  CHECK(estimate_k_eigengap(std::vector<double>{0, 0, 0.9, 1.0, 1.1}) == 2);
  CHECK(estimate_k_eigengap(std::vector<double>{0.5, 0.5, 0.5, 0.5}) == 1);
  CHECK(estimate_k_eigengap(std::vector<double>{0, 1.0, 1.05, 1.1}) == 1);
  CHECK(estimate_k_eigengap(std::vector<double>{0, 0, 0, 0, 0.9, 1}, 3) <= 3);
}

TEST_CASE("k-means basics") {
  const Matrix pts = rows_of({{0, 0}, {0.1, 0}, {0, 0.1}, {10, 10}, {10.1, 10}, {10, 10.1}});
  const auto one = kmeans(pts, 1, 3);
  CHECK(one.assignment.k == 1);
  CHECK(one.centroids(0, 0) == doctest::Approx((0.1 + 30.1) / 6.0));

  const auto two = kmeans(pts, 2, 3);
  CHECK(oracle::same_partition(two.assignment.labels, {0, 0, 0, 1, 1, 1}));

  const auto three = kmeans(rows_of({{0, 0}, {5, 0}, {0, 5}}), 3, 1);
  CHECK(three.wcss == doctest::Approx(0.0));
  CHECK(three.assignment.k == 3);

  CHECK_THROWS_AS(kmeans(pts, 7, 1), Error);
  CHECK_THROWS_AS(kmeans(pts, 0, 1), Error);
}

TEST_CASE("Lloyd iterations never increase the objective") {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix pts(60, 3);
    for (std::size_t i = 0; i < 60; ++i)
      for (std::size_t j = 0; j < 3; ++j) pts(i, j) = rng.normal() + static_cast<double>(i % 4) * 2.0;
    const auto r = kmeans(pts, 4, static_cast<std::uint64_t>(trial));
    for (std::size_t i = 1; i < r.wcss_trace.size(); ++i) CHECK(r.wcss_trace[i] <= r.wcss_trace[i - 1] + 1e-9);
  }
}

TEST_CASE("spectral clustering on planted blocks") {
  const auto two = oracle::planted_blocks(2, 20, 0.9, 0.05, 1);
  const auto a = spectral_cluster(two.embeddings);
  CHECK(a.k == 2);
  CHECK(oracle::same_partition(a.labels, two.truth));

  const auto four = oracle::planted_blocks(4, 10, 0.9, 0.05, 2);
  const auto b = spectral_cluster(four.embeddings);
  CHECK(b.k == 4);
  CHECK(oracle::same_partition(b.labels, four.truth));

  SpectralOptions forced;
  forced.k_override = 2;
  CHECK(spectral_cluster(four.embeddings, forced).k == 2);
}

TEST_CASE("identical embeddings form one cluster") {
  Matrix same(12, 4, 0.5);
  const auto sc = spectral_cluster(same);
  CHECK(sc.k == 1);
  CHECK(std::all_of(sc.labels.begin(), sc.labels.end(), [](int l) { return l == 0; }));
  const auto ahc = ahc_cluster(same);
  CHECK(ahc.k == 1);
}

TEST_CASE("average linkage and cuts") {
  const Matrix d = rows_of({{0, 0.1, 0.9, 0.95}, {0.1, 0, 0.85, 0.9}, {0.9, 0.85, 0, 0.2}, {0.95, 0.9, 0.2, 0}});
  const auto merges = average_linkage(d);
  REQUIRE(merges.size() == 3);
  CHECK(merges[0].distance == doctest::Approx(0.1));
  CHECK(merges[1].distance == doctest::Approx(0.2));
  CHECK(merges[2].distance == doctest::Approx((0.9 + 0.95 + 0.85 + 0.9) / 4.0));
  CHECK(oracle::same_partition(cut_to_k(4, merges, 2).labels, {0, 0, 1, 1}));
  CHECK(cut_at_distance(4, merges, 0.15).k == 3);
  CHECK(cut_at_distance(4, merges, 2.0).k == 1);
}

TEST_CASE("silhouette by hand") {
  const Matrix d = rows_of({{0, 1, 4}, {1, 0, 4}, {4, 4, 0}});
  // points 0,1: a = 1, b = 4 -> 0.75; point 2 is a singleton -> 0
  CHECK(silhouette_score(d, std::vector<int>{0, 0, 1}) == doctest::Approx(0.5));
}

TEST_CASE("AHC") {
  const auto blocks = oracle::planted_blocks(2, 8, 0.95, 0.05, 5);
  const auto a = ahc_cluster(blocks.embeddings);
  CHECK(a.k == 2);
  CHECK(oracle::same_partition(a.labels, blocks.truth));

  // two points at cosine distance 0.8 stay apart under the 0.5 threshold
  const double c = 0.2;
  const auto pair = ahc_cluster(rows_of({{1, 0}, {c, std::sqrt(1 - c * c)}}));
  CHECK(pair.k == 2);
}

TEST_CASE("row permutation permutes labels") {
  SplitMix64 rng(44);
  const auto set = oracle::planted_blocks(3, 12, 0.9, 0.05, 9);
  std::vector<std::size_t> perm(set.truth.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  const Matrix shuffled = permute_rows(set.embeddings, perm);

  for (bool spectral : {true, false}) {
    const auto base = spectral ? spectral_cluster(set.embeddings) : ahc_cluster(set.embeddings);
    const auto moved = spectral ? spectral_cluster(shuffled) : ahc_cluster(shuffled);
    std::vector<int> expected(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) expected[i] = base.labels[perm[i]];
    CHECK(oracle::same_partition(moved.labels, expected));
  }
}

TEST_CASE("canonical labels follow first appearance") {
  const auto a = canonicalize(std::vector<int>{5, 5, 2, 9, 2});
  CHECK(a.labels == std::vector<int>{0, 0, 1, 2, 1});
  CHECK(a.k == 3);
}
