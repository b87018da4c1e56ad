#include "diarkit/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>

#include "diarkit/error.hpp"
#include "diarkit/rng.hpp"
#include "text_util.hpp"

namespace diarkit {

void EmbeddingProviderConfig::validate() const {
  if (kind == Kind::BuiltinPooled && dim < 2) throw Error(Errc::BadParams, "embedding dim must be >= 2");
  if (kind == Kind::FileStore && store_path.empty()) {
    throw Error(Errc::BadParams, "file embedder needs an embedding store path");
  }
}

std::vector<double> unit_normalize(std::span<const double> v) {
  const double norm = std::sqrt(dot(v, v));
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(Errc::ZeroVector, "cannot normalise a zero vector");
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= norm;
  return out;
}

std::pair<std::size_t, std::size_t> frames_in(const FeatureMatrix& features, const SubSegment& seg) {
  const auto& t = features.frame_times;
  const auto first = std::lower_bound(t.begin(), t.end(), seg.start);
  const auto last = std::lower_bound(first, t.end(), seg.end);
  return {static_cast<std::size_t>(first - t.begin()), static_cast<std::size_t>(last - t.begin())};
}

std::vector<double> pooled_statistics(const Matrix& frames, std::size_t first, std::size_t last) {
  if (first >= last || last > frames.rows()) {
    throw Error(Errc::EmptySubsegment, "subsegment contains no feature frames");
  }
  const std::size_t bins = frames.cols();
  const auto count = static_cast<double>(last - first);
  std::vector<double> stats(2 * bins, 0.0);
  for (std::size_t t = first; t < last; ++t) {
    const auto row = frames.row(t);
    for (std::size_t m = 0; m < bins; ++m) stats[m] += row[m];
  }
  for (std::size_t m = 0; m < bins; ++m) stats[m] /= count;
  for (std::size_t t = first; t < last; ++t) {
    const auto row = frames.row(t);
    for (std::size_t m = 0; m < bins; ++m) {
      const double d = row[m] - stats[m];
      stats[bins + m] += d * d;
    }
  }
  for (std::size_t m = 0; m < bins; ++m) stats[bins + m] = std::sqrt(stats[bins + m] / count);
  return stats;
}

Matrix gaussian_projection(std::size_t in_dim, std::size_t out_dim, std::uint64_t seed) {
  Matrix p(in_dim, out_dim);
  SplitMix64 rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(out_dim));
  for (double& v : p.data()) v = rng.normal() * scale;
  return p;
}

BuiltinEmbedder::BuiltinEmbedder(std::size_t n_mels, int dim, std::uint64_t seed) {
  if (dim < 2) throw Error(Errc::BadParams, "embedding dim must be >= 2");
  projection_ = gaussian_projection(2 * n_mels, static_cast<std::size_t>(dim), seed);
}

std::vector<double> BuiltinEmbedder::embed_frames(const Matrix& frames, std::size_t first,
                                                  std::size_t last) const {
  if (frames.cols() * 2 != projection_.rows()) {
    throw Error(Errc::DimensionMismatch, "feature width does not match the projection");
  }
  const auto raw = pooled_statistics(frames, first, last);

  // Centre the mean half and the std half separately: the common log-energy
  // offset otherwise dominates every cosine.
  std::vector<double> stats = raw;
  const std::size_t half = frames.cols();
  bool flat = true;
  for (std::size_t h = 0; h < 2; ++h) {
    double mean = 0.0;
    for (std::size_t m = 0; m < half; ++m) mean += stats[h * half + m];
    mean /= static_cast<double>(half);
    for (std::size_t m = 0; m < half; ++m) {
      stats[h * half + m] -= mean;
      flat = flat && std::abs(stats[h * half + m]) < 1e-12;
    }
  }
  // A spectrally flat, stationary input has nothing left after centring.
  if (flat) stats = raw;

  std::vector<double> projected(projection_.cols(), 0.0);
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const double s = stats[i];
    const auto row = projection_.row(i);
    for (std::size_t j = 0; j < projected.size(); ++j) projected[j] += s * row[j];
  }
  return unit_normalize(projected);
}

std::vector<double> BuiltinEmbedder::embed(const std::string&, const FeatureMatrix& features,
                                           const SubSegment& seg) const {
  const auto [first, last] = frames_in(features, seg);
  return embed_frames(features.frames, first, last);
}

EmbeddingStore EmbeddingStore::parse(std::string_view content) {
  EmbeddingStore store;
  bool have_header = false;
  text::for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') return;
    const auto tok = text::split_ws(trimmed);
    if (!have_header) {
      if (tok.size() != 3 || tok[0] != "DIARKIT-EMB" || tok[1] != "v1" || !tok[2].starts_with("dim=")) {
        throw ParseError(line_no, "expected header 'DIARKIT-EMB v1 dim=D'");
      }
      const auto dim = text::to_int<std::size_t>(tok[2].substr(4));
      if (!dim || *dim < 1) throw ParseError(line_no, "bad dimension in header");
      store.dim_ = *dim;
      have_header = true;
      return;
    }
    if (tok.size() < 4) throw ParseError(line_no, "expected 'file_id start end v1 ... vD'");
    if (tok.size() != 3 + store.dim_) {
      throw Error(Errc::DimensionMismatch, "line " + std::to_string(line_no) + ": vector has " +
                                               std::to_string(tok.size() - 3) + " values, store dim is " +
                                               std::to_string(store.dim_));
    }
    StoreEntry entry;
    entry.file_id = std::string(tok[0]);
    const auto start = text::to_double(tok[1]);
    const auto end = text::to_double(tok[2]);
    if (!start || !end) throw ParseError(line_no, "non-numeric time");
    entry.start = *start;
    entry.end = *end;
    std::vector<double> values(store.dim_);
    for (std::size_t i = 0; i < store.dim_; ++i) {
      const auto v = text::to_double(tok[3 + i]);
      if (!v) throw ParseError(line_no, "non-numeric vector component");
      values[i] = *v;
    }
    try {
      entry.vector = unit_normalize(values);
    } catch (const Error&) {
      throw ParseError(line_no, "zero embedding vector");
    }
    store.entries_.push_back(std::move(entry));
  });
  if (!have_header) throw ParseError(0, "empty embedding store");
  std::stable_sort(store.entries_.begin(), store.entries_.end(), [](const StoreEntry& a, const StoreEntry& b) {
    return a.file_id != b.file_id ? a.file_id < b.file_id : a.start < b.start;
  });
  return store;
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const std::vector<double>& EmbeddingStore::lookup(const std::string& file_id, double start, double end) const {
  constexpr double kTol = 1e-3 + 1e-9;
  const StoreEntry* best = nullptr;
  for (const auto& e : entries_) {
    if (e.file_id != file_id) continue;
    if (std::abs(e.start - start) > kTol || std::abs(e.end - end) > kTol) continue;
    if (!best || std::abs(e.start - start) < std::abs(best->start - start)) best = &e;
  }
  if (!best) {
    throw Error(Errc::MissingEntry, "no stored embedding for " + file_id + " [" + text::shortest(start) +
                                        ", " + text::shortest(end) + ")");
  }
  return best->vector;
}

std::vector<double> EmbeddingStore::embed(const std::string& file_id, const FeatureMatrix&,
                                          const SubSegment& seg) const {
  return lookup(file_id, seg.start, seg.end);
}

std::string format_embedding_store(std::span<const StoreEntry> entries) {
  std::string out = "DIARKIT-EMB v1 dim=" + std::to_string(entries.empty() ? 0 : entries.front().vector.size()) + "\n";
  for (const auto& e : entries) {
    out += e.file_id + ' ' + text::shortest(e.start) + ' ' + text::shortest(e.end);
    for (double v : e.vector) out += ' ' + text::shortest(v);
    out += '\n';
  }
  return out;
}

Matrix embed_all(const EmbeddingProvider& provider, const std::string& file_id, const FeatureMatrix& features,
                 std::span<const SubSegment> segments) {
  const std::size_t dim = provider.dim();
  Matrix out(segments.size(), dim);
  std::vector<std::exception_ptr> errors(segments.size());
  const auto n = static_cast<std::ptrdiff_t>(segments.size());
#pragma omp parallel for schedule(dynamic, 4) if (segments.size() >= 32)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      const auto v = provider.embed(file_id, features, segments[idx]);
      if (v.size() != dim) throw Error(Errc::DimensionMismatch, "provider returned the wrong dimension");
      std::copy(v.begin(), v.end(), out.row(idx).begin());
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace diarkit
