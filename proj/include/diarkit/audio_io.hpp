#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace diarkit {

/// Canonical mono signal. Amplitudes lie in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string source_id;

  double duration() const noexcept {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// Decoded WAV contents before downmixing; one vector per channel.
struct WavData {
  std::vector<std::vector<double>> channels;
  int sample_rate = 0;
  int bits_per_sample = 0;
  std::string source_id;

  std::size_t channel_count() const noexcept { return channels.size(); }
};

/// Parses a RIFF/WAVE image held in memory. Accepts PCM-16 and IEEE float-32
/// (plain or WAVE_FORMAT_EXTENSIBLE); unknown chunks are skipped.
WavData parse_wav(std::span<const unsigned char> bytes, std::string source_id = {});

/// Reads a WAV file; `source_id` is the file stem.
WavData read_wav(const std::filesystem::path& path);

/// Per-sample arithmetic mean across channels.
AudioBuffer downmix_to_mono(std::span<const std::vector<double>> channels, int sample_rate,
                            std::string source_id = {});

/// Returns `buf` unchanged when its rate equals `expected_rate`, otherwise
/// throws RateMismatch. No resampling is ever performed.
AudioBuffer validate_rate(AudioBuffer buf, int expected_rate);

/// read_wav + downmix + validate_rate. Sets `*downmixed` when the file had
/// more than one channel.
AudioBuffer load_mono(const std::filesystem::path& path, int expected_rate,
                      bool* downmixed = nullptr);

/// Encodes mono PCM-16. Samples are clamped to [-1, 1] and scaled by 32768.
std::vector<unsigned char> encode_wav_pcm16(const AudioBuffer& buf);
void write_wav_pcm16(const std::filesystem::path& path, const AudioBuffer& buf);

}  // namespace diarkit
