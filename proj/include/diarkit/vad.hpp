#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diarkit/audio_io.hpp"
#include "diarkit/timeline.hpp"

namespace diarkit {

inline constexpr double kDefaultVadThreshold = 0.15;

struct VadConfig {
  /// Unset means "use the aggressiveness preset, or 0.15 without one".
  std::optional<double> threshold;
  int frame_ms = 20;
  std::optional<int> aggressiveness;
  int hangover_frames = 8;
  double min_speech_s = 0.2;
  double merge_gap_s = 0.3;

  double effective_threshold() const noexcept {
    return threshold.value_or(kDefaultVadThreshold);
  }
  double frame_s() const noexcept { return frame_ms / 1000.0; }

  /// Throws BadParams (or BadLevel for the aggressiveness) on invalid fields.
  void validate() const;

  friend bool operator==(const VadConfig&, const VadConfig&) = default;
};

/// Per-frame speech scores: log-RMS of each non-overlapping frame_ms frame,
/// min-max normalised over the file. A file whose frames all have the same
/// energy scores 0 everywhere. Throws TooShort when shorter than one frame.
std::vector<double> energy_vad_frames(const AudioBuffer& buf, const VadConfig& cfg);

/// Thresholds frame scores into speech regions, then extends each run by
/// the hangover, merges runs separated by less than merge_gap_s and drops
/// runs shorter than min_speech_s. Regions never extend past the last frame.
Timeline frames_to_regions(std::span<const double> probs, const VadConfig& cfg,
                           std::string file_id = {});

/// Aggressiveness presets (threshold, hangover):
///   0 -> (0.30, 10), 1 -> (0.45, 8), 2 -> (0.60, 5), 3 -> (0.75, 2).
/// An explicitly set threshold survives; the hangover always comes from the
/// preset. A config without aggressiveness is returned unchanged. Throws
/// BadLevel for levels outside 0..3.
VadConfig apply_aggressiveness(VadConfig cfg);

/// Energy VAD end to end: presets, frame scores, region extraction.
Timeline run_energy_vad(const AudioBuffer& buf, const VadConfig& cfg);

/// External labels: "start end" lines or RTTM SPEAKER lines (only lines for
/// `file_id` are kept when RTTM). Overlaps are merged. Throws ParseError.
Timeline parse_external_vad(std::string_view text, const std::string& file_id);
Timeline load_external_vad(const std::filesystem::path& path, const std::string& file_id);

}  // namespace diarkit
