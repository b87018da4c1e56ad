#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diarkit/features.hpp"
#include "diarkit/matrix.hpp"
#include "diarkit/segmentation.hpp"

namespace diarkit {

struct EmbeddingProviderConfig {
  enum class Kind { BuiltinPooled, FileStore };

  Kind kind = Kind::BuiltinPooled;
  int dim = 64;
  std::uint64_t seed = 42;
  std::filesystem::path store_path;

  void validate() const;
  friend bool operator==(const EmbeddingProviderConfig&, const EmbeddingProviderConfig&) = default;
};

/// Scales v to unit L2 norm. Throws ZeroVector for a zero (or non-finite) norm.
std::vector<double> unit_normalize(std::span<const double> v);

/// Frame index range [first, last) whose centres fall inside the subsegment.
std::pair<std::size_t, std::size_t> frames_in(const FeatureMatrix& features, const SubSegment& seg);

/// Per-bin mean then per-bin (population) standard deviation over frames
/// [first, last): a 2*n_mels statistic vector. Throws EmptySubsegment.
std::vector<double> pooled_statistics(const Matrix& frames, std::size_t first, std::size_t last);

/// in_dim x out_dim matrix of N(0, 1/out_dim) draws from SplitMix64(seed),
/// filled row-major.
Matrix gaussian_projection(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dim() const = 0;
  virtual std::vector<double> embed(const std::string& file_id, const FeatureMatrix& features,
                                    const SubSegment& seg) const = 0;
};

/// Deterministic stand-in for a neural speaker encoder: pooled log-mel
/// statistics, each half centred on its own mean, projected through a fixed
/// Gaussian matrix and unit-normalised.
class BuiltinEmbedder final : public EmbeddingProvider {
 public:
  BuiltinEmbedder(std::size_t n_mels, int dim, std::uint64_t seed);

  std::size_t dim() const override { return projection_.cols(); }
  std::vector<double> embed(const std::string& file_id, const FeatureMatrix& features,
                            const SubSegment& seg) const override;

  std::vector<double> embed_frames(const Matrix& frames, std::size_t first, std::size_t last) const;

 private:
  Matrix projection_;
};

struct StoreEntry {
  std::string file_id;
  double start = 0.0;
  double end = 0.0;
  std::vector<double> vector;
};

/// Precomputed embeddings from a text store:
///   DIARKIT-EMB v1 dim=D
///   <file_id> <start> <end> v1 ... vD
/// Vectors are re-normalised on load.
class EmbeddingStore final : public EmbeddingProvider {
 public:
  static EmbeddingStore parse(std::string_view text);
  static EmbeddingStore load(const std::filesystem::path& path);

  std::size_t dim() const override { return dim_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Entry for file_id whose start and end both lie within 1 ms of the
  /// subsegment's (nearest start wins). Throws MissingEntry.
  const std::vector<double>& lookup(const std::string& file_id, double start, double end) const;

  std::vector<double> embed(const std::string& file_id, const FeatureMatrix& features,
                            const SubSegment& seg) const override;

 private:
  std::size_t dim_ = 0;
  std::vector<StoreEntry> entries_;  // sorted by (file_id, start)
};

std::string format_embedding_store(std::span<const StoreEntry> entries);

/// n x D matrix of embeddings, one row per subsegment, computed in parallel.
Matrix embed_all(const EmbeddingProvider& provider, const std::string& file_id,
                 const FeatureMatrix& features, std::span<const SubSegment> segments);

}  // namespace diarkit
