#include "diarkit/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>

#include "diarkit/error.hpp"
#include "diarkit/kernels.hpp"

namespace diarkit {

std::size_t MelConfig::win_samples(int sample_rate) const {
  return static_cast<std::size_t>(std::llround(win_ms * sample_rate / 1000.0));
}

std::size_t MelConfig::hop_samples(int sample_rate) const {
  return static_cast<std::size_t>(std::llround(hop_ms * sample_rate / 1000.0));
}

std::size_t MelConfig::resolved_fft_size(int sample_rate) const {
  if (fft_size > 0) return static_cast<std::size_t>(fft_size);
  return std::bit_ceil(std::max<std::size_t>(win_samples(sample_rate), 1));
}

double MelConfig::resolved_f_max(int sample_rate) const {
  return f_max > 0.0 ? f_max : sample_rate / 2.0;
}

void MelConfig::validate(int sample_rate) const {
  auto bad = [](const std::string& why) { throw Error(Errc::BadParams, "mel config: " + why); };
  if (sample_rate <= 0) bad("sample rate must be positive");
  if (n_mels < 1) bad("n_mels must be >= 1");
  if (!(hop_ms > 0.0) || hop_ms > win_ms) bad("need 0 < hop_ms <= win_ms");
  if (hop_samples(sample_rate) == 0) bad("hop is shorter than one sample");
  const std::size_t fft = resolved_fft_size(sample_rate);
  if (!std::has_single_bit(fft)) bad("fft_size must be a power of two");
  if (fft < win_samples(sample_rate)) bad("fft_size smaller than the window");
  const double fmax = resolved_f_max(sample_rate);
  if (!(f_min >= 0.0) || !(f_min < fmax) || fmax > sample_rate / 2.0) {
    bad("need 0 <= f_min < f_max <= sample_rate/2");
  }
  if (!(log_floor > 0.0)) bad("log_floor must be positive");
}

double hz_to_mel(double hz) noexcept { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) noexcept { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

namespace {

// n_mels + 2 edge frequencies equally spaced in mel.
std::vector<double> mel_edges(const MelConfig& cfg, int sample_rate) {
  const double lo = hz_to_mel(cfg.f_min);
  const double hi = hz_to_mel(cfg.resolved_f_max(sample_rate));
  const int points = cfg.n_mels + 2;
  std::vector<double> edges(points);
  for (int i = 0; i < points; ++i) {
    edges[i] = mel_to_hz(lo + (hi - lo) * i / (points - 1));
  }
  return edges;
}

}  // namespace

std::vector<double> mel_center_frequencies(const MelConfig& cfg, int sample_rate) {
  cfg.validate(sample_rate);
  auto edges = mel_edges(cfg, sample_rate);
  return {edges.begin() + 1, edges.end() - 1};
}

Matrix mel_filterbank_matrix(const MelConfig& cfg, int sample_rate) {
  cfg.validate(sample_rate);
  const std::size_t fft = cfg.resolved_fft_size(sample_rate);
  const std::size_t bins = fft / 2 + 1;
  const auto edges = mel_edges(cfg, sample_rate);
  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(fft);

  Matrix fb(static_cast<std::size_t>(cfg.n_mels), bins);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double left = edges[m];
    const double centre = edges[m + 1];
    const double right = edges[m + 2];
    bool any = false;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      const double w = std::max(0.0, std::min((f - left) / (centre - left), (right - f) / (right - centre)));
      fb(m, k) = w;
      any = any || w > 0.0;
    }
    if (!any) {
      throw Error(Errc::DegenerateFilter,
                  "mel filter " + std::to_string(m) + " (" + std::to_string(left) + "-" +
                      std::to_string(right) + " Hz) covers no FFT bin; lower n_mels or raise fft_size");
    }
  }
  return fb;
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

std::size_t frame_count(std::size_t n_samples, std::size_t win, std::size_t hop) noexcept {
  if (win == 0 || hop == 0 || n_samples < win) return 0;
  return (n_samples - win) / hop + 1;
}

FeatureMatrix log_mel(const AudioBuffer& buf, const MelConfig& cfg) {
  const int sr = buf.sample_rate;
  cfg.validate(sr);
  const std::size_t win = cfg.win_samples(sr);
  const std::size_t hop = cfg.hop_samples(sr);
  const std::size_t frames = frame_count(buf.samples.size(), win, hop);
  if (frames == 0) {
    throw Error(Errc::TooShort, std::to_string(buf.samples.size()) + " samples is shorter than one " +
                                    std::to_string(win) + "-sample window");
  }

  const Matrix fb = mel_filterbank_matrix(cfg, sr);
  const auto window = hann_window(win);
  const kernels::FrameSpec spec{win, hop, cfg.resolved_fft_size(sr), cfg.log_floor};

  FeatureMatrix out;
  out.frames = Matrix(frames, static_cast<std::size_t>(cfg.n_mels));
  kernels::omp::log_mel_frames(buf.samples, spec, window, fb, out.frames);
  out.hop_s = static_cast<double>(hop) / sr;
  out.frame_times.resize(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    out.frame_times[t] = (static_cast<double>(t * hop) + static_cast<double>(win) / 2.0) / sr;
  }
  return out;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_feature_dump(const std::filesystem::path& path, const FeatureMatrix& features) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out.write("MELF", 4);
  put_u32(out, static_cast<std::uint32_t>(features.frames.rows()));
  put_u32(out, static_cast<std::uint32_t>(features.frames.cols()));
  put_u32(out, 0);
  for (double v : features.frames.data()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  if (!out) throw Error(Errc::Io, "short write to " + path.string());
}

Matrix read_feature_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || std::memcmp(bytes.data(), "MELF", 4) != 0) {
    throw Error(Errc::ParseError, path.string() + " is not a MELF feature dump");
  }
  const std::size_t rows = get_u32(bytes.data() + 4);
  const std::size_t cols = get_u32(bytes.data() + 8);
  if (bytes.size() != 16 + rows * cols * 4) {
    throw Error(Errc::TruncatedFile, path.string() + " payload size does not match its header");
  }
  Matrix m(rows, cols);
  auto data = m.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<float>(get_u32(bytes.data() + 16 + 4 * i));
  }
  return m;
}

}  // namespace diarkit
