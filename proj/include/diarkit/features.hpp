#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "diarkit/audio_io.hpp"
#include "diarkit/matrix.hpp"

namespace diarkit {

/// Log-mel front end parameters. Zero for `fft_size` or `f_max` means
/// "derive from the sample rate" (next power of two >= window, Nyquist).
struct MelConfig {
  int n_mels = 80;
  double win_ms = 25.0;
  double hop_ms = 10.0;
  int fft_size = 0;
  double f_min = 20.0;
  double f_max = 0.0;
  double log_floor = 1e-10;

  std::size_t win_samples(int sample_rate) const;
  std::size_t hop_samples(int sample_rate) const;
  std::size_t resolved_fft_size(int sample_rate) const;
  double resolved_f_max(int sample_rate) const;

  /// Throws BadParams when any invariant fails for this sample rate.
  void validate(int sample_rate) const;

  friend bool operator==(const MelConfig&, const MelConfig&) = default;
};

struct FeatureMatrix {
  Matrix frames;                    // T x n_mels natural-log energies
  std::vector<double> frame_times;  // frame centres, seconds
  double hop_s = 0.0;

  std::size_t num_frames() const noexcept { return frames.rows(); }
};

double hz_to_mel(double hz) noexcept;
double mel_to_hz(double mel) noexcept;

/// Centre frequencies (Hz) of the triangular filters, strictly increasing.
std::vector<double> mel_center_frequencies(const MelConfig& cfg, int sample_rate);

/// n_mels x (fft_size/2 + 1) triangular filterbank on the HTK mel scale.
/// Throws DegenerateFilter if any filter covers no FFT bin.
Matrix mel_filterbank_matrix(const MelConfig& cfg, int sample_rate);

/// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

/// In-place forward DFT (FFTW), unnormalised.
void fft_inplace(std::span<std::complex<double>> data);

/// Frame count for n samples: floor((n - win) / hop) + 1, or 0 if n < win.
std::size_t frame_count(std::size_t n_samples, std::size_t win, std::size_t hop) noexcept;

/// log(max(filterbank . |STFT|^2, log_floor)) with a Hann window and no
/// pre-emphasis. Throws TooShort if the buffer is shorter than one window.
FeatureMatrix log_mel(const AudioBuffer& buf, const MelConfig& cfg);

/// Binary dump: "MELF", u32 T, u32 n_mels, u32 reserved, then T*n_mels
/// little-endian float32 in row-major order.
void write_feature_dump(const std::filesystem::path& path, const FeatureMatrix& features);
Matrix read_feature_dump(const std::filesystem::path& path);

}  // namespace diarkit
