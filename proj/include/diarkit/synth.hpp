#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diarkit/audio_io.hpp"
#include "diarkit/rttm.hpp"

namespace diarkit {

struct SynthConfig {
  int n_speakers = 2;
  double duration_s = 60.0;
  std::uint64_t seed = 7;
  int sample_rate = 16000;
  std::string file_id = "synth";

  void validate() const;
};

struct SynthResult {
  AudioBuffer audio;
  std::vector<RttmRecord> reference;
};

/// Deterministic conversation: every speaker is Gaussian noise limited to its
/// own mel-spaced frequency band, amplitude-modulated at a syllabic rate. Turns last 2-6 s and are separated by 0.3-1.0 s of
/// low-level background noise; the first n turns introduce every speaker.
SynthResult synthesize_conversation(const SynthConfig& cfg);

/// [lo, hi) frequency band of speaker s out of n.
std::pair<double, double> speaker_band(int speaker, int n_speakers);

}  // namespace diarkit
