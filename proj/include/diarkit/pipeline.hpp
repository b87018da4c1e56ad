#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diarkit/audio_io.hpp"
#include "diarkit/clustering.hpp"
#include "diarkit/embedding.hpp"
#include "diarkit/features.hpp"
#include "diarkit/rttm.hpp"
#include "diarkit/segmentation.hpp"
#include "diarkit/timeline.hpp"
#include "diarkit/vad.hpp"

namespace diarkit {

enum class VadMode { Energy, External };
enum class ClustererKind { Spectral, Ahc };

/// Everything a diarization run depends on. Serialises to flat key=value text.
struct PipelineConfig {
  int sample_rate = 16000;
  MelConfig mel;
  VadMode vad_mode = VadMode::Energy;
  VadConfig vad = default_vad();
  /// File (used for every input) or directory holding <stem>.txt / <stem>.rttm.
  std::filesystem::path vad_labels;
  WindowConfig window;
  EmbeddingProviderConfig embedder;
  ClustererKind clusterer = ClustererKind::Spectral;
  std::optional<int> num_speakers;
  int max_speakers = 8;
  double ahc_threshold = 0.5;
  std::uint64_t seed = 42;

  /// Energy VAD at the aggressiveness-0 threshold with a short hangover.
  static VadConfig default_vad();

  void validate() const;
  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Canonical key=value text, one key per line in a fixed order.
std::string serialize_config(const PipelineConfig& cfg);
/// Starts from defaults and applies every "key=value" line; blank lines and
/// '#' comments are skipped. Throws ParseError for unknown keys/bad values.
PipelineConfig parse_config(std::string_view text);
/// Applies one key=value pair to an existing config.
void apply_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value);

struct DiarizeResult {
  std::string file_id;
  Timeline speech;
  std::vector<SubSegment> subsegments;
  ClusterAssignment assignment;
  Timeline hypothesis;
  std::vector<RttmRecord> records;
  FeatureMatrix features;
  int num_speakers = 0;
};

/// VAD -> windows -> embeddings -> clustering -> turns for one mono buffer.
/// `speech` overrides the built-in VAD when given. `provider` defaults to the
/// one described by cfg.embedder.
DiarizeResult diarize_buffer(const AudioBuffer& audio, const PipelineConfig& cfg,
                             const Timeline* speech = nullptr,
                             const EmbeddingProvider* provider = nullptr);

/// Builds the provider cfg.embedder describes.
std::unique_ptr<EmbeddingProvider> make_provider(const PipelineConfig& cfg);

/// Speech regions for `audio` under cfg (energy VAD or external labels).
Timeline detect_speech(const AudioBuffer& audio, const PipelineConfig& cfg);

}  // namespace diarkit
