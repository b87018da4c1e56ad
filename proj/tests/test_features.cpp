#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "diarkit/error.hpp"
#include "diarkit/features.hpp"
#include "diarkit/rng.hpp"

using namespace diarkit;

namespace {

AudioBuffer noise(double seconds, std::uint64_t seed, double scale = 0.1) {
  SplitMix64 rng(seed);
  AudioBuffer b{std::vector<double>(static_cast<std::size_t>(seconds * 16000)), 16000, "n"};
  for (auto& s : b.samples) s = scale * rng.normal();
  return b;
}

}  // namespace

TEST_CASE("filterbank shape and centres") {
  MelConfig cfg;
  cfg.fft_size = 512;
  const Matrix fb = mel_filterbank_matrix(cfg, 16000);
  CHECK(fb.rows() == 80);
  CHECK(fb.cols() == 257);
  const auto centres = mel_center_frequencies(cfg, 16000);
  for (std::size_t i = 1; i < centres.size(); ++i) CHECK(centres[i] > centres[i - 1]);
}

TEST_CASE("too many filters for the FFT size is DegenerateFilter") {
  MelConfig cfg;
  cfg.n_mels = 300;
  cfg.fft_size = 512;
  CHECK_THROWS_AS(mel_filterbank_matrix(cfg, 16000), Error);
  try {
    mel_filterbank_matrix(cfg, 16000);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateFilter);
  }
}

TEST_CASE("mel scale round trip") {
  for (double hz : {0.0, 20.0, 700.0, 1000.0, 8000.0}) CHECK(mel_to_hz(hz_to_mel(hz)) == doctest::Approx(hz));
  CHECK(hz_to_mel(1000.0) == doctest::Approx(1000.0).epsilon(0.01));
}

TEST_CASE("FFT agrees with a direct DFT") {
  SplitMix64 rng(4);
  std::vector<std::complex<double>> x(64), y;
  for (auto& v : x) v = {rng.normal(), rng.normal()};
  y = x;
  fft_inplace(y);
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::complex<double> s = 0;
    for (std::size_t n = 0; n < x.size(); ++n)
      s += x[n] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * n) / 64.0);
    CHECK(std::abs(s - y[k]) < 1e-9);
  }
}

TEST_CASE("frame count for two seconds") {
  const FeatureMatrix f = log_mel(noise(2.0, 1), MelConfig{});
  CHECK(f.num_frames() == 198);
  CHECK(frame_count(32000, 400, 160) == 198);
  CHECK(frame_count(399, 400, 160) == 0);
  CHECK(f.frame_times.front() == doctest::Approx(0.0125));
  CHECK(f.frame_times[1] - f.frame_times[0] == doctest::Approx(0.01));
}

TEST_CASE("silence hits the log floor everywhere") {
  AudioBuffer z{std::vector<double>(8000, 0.0), 16000, "z"};
  const MelConfig cfg;
  const FeatureMatrix f = log_mel(z, cfg);
  for (std::size_t t = 0; t < f.num_frames(); ++t)
    for (std::size_t m = 0; m < f.frames.cols(); ++m) CHECK(f.frames(t, m) == std::log(cfg.log_floor));
}

TEST_CASE("a 1 kHz tone peaks in the filter nearest 1 kHz") {
  AudioBuffer b{std::vector<double>(16000), 16000, "tone"};
  for (std::size_t i = 0; i < b.samples.size(); ++i)
    b.samples[i] = 0.5 * std::sin(2.0 * std::numbers::pi * 1000.0 * static_cast<double>(i) / 16000.0);
  const MelConfig cfg;
  const auto centres = mel_center_frequencies(cfg, 16000);
  std::size_t nearest = 0;
  for (std::size_t m = 1; m < centres.size(); ++m)
    if (std::abs(centres[m] - 1000.0) < std::abs(centres[nearest] - 1000.0)) nearest = m;
  const FeatureMatrix f = log_mel(b, cfg);
  for (std::size_t t = 0; t < f.num_frames(); t += 17) {
    std::size_t best = 0;
    for (std::size_t m = 1; m < f.frames.cols(); ++m)
      if (f.frames(t, m) > f.frames(t, best)) best = m;
    CHECK(best == nearest);
  }
}

TEST_CASE("one frame against a direct computation") {
  const AudioBuffer b = noise(0.2, 8);
  MelConfig cfg;
  const FeatureMatrix f = log_mel(b, cfg);
  const Matrix fb = mel_filterbank_matrix(cfg, 16000);
  const std::size_t win = cfg.win_samples(16000), hop = cfg.hop_samples(16000), nfft = cfg.resolved_fft_size(16000);
  const std::size_t t = 5;
  std::vector<double> power(nfft / 2 + 1, 0.0);
  for (std::size_t k = 0; k < power.size(); ++k) {
    std::complex<double> s = 0;
    for (std::size_t n = 0; n < win; ++n) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(win));
      s += w * b.samples[t * hop + n] *
           std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * n) / static_cast<double>(nfft));
    }
    power[k] = std::norm(s);
  }
  for (std::size_t m = 0; m < fb.rows(); ++m) {
    double e = 0.0;
    for (std::size_t k = 0; k < power.size(); ++k) e += fb(m, k) * power[k];
    CHECK(f.frames(t, m) == doctest::Approx(std::log(std::max(e, cfg.log_floor))).epsilon(1e-9));
  }
}

TEST_CASE("scaling the waveform shifts log-mel by 2 log c") {
  const AudioBuffer a = noise(0.5, 2);
  AudioBuffer b = a;
  for (auto& s : b.samples) s *= 3.0;
  const FeatureMatrix fa = log_mel(a, MelConfig{}), fb = log_mel(b, MelConfig{});
  for (std::size_t t = 0; t < fa.num_frames(); ++t)
    for (std::size_t m = 0; m < fa.frames.cols(); ++m)
      CHECK(fb.frames(t, m) - fa.frames(t, m) == doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-9));
}

TEST_CASE("shifting by one hop shifts frames by one") {
  const AudioBuffer a = noise(0.5, 3);
  AudioBuffer b = a;
  b.samples.erase(b.samples.begin(), b.samples.begin() + 160);
  const FeatureMatrix fa = log_mel(a, MelConfig{}), fb = log_mel(b, MelConfig{});
  for (std::size_t t = 0; t + 1 < fa.num_frames() && t < fb.num_frames(); ++t)
    for (std::size_t m = 0; m < fa.frames.cols(); ++m) CHECK(std::abs(fb.frames(t, m) - fa.frames(t + 1, m)) < 1e-9);
}

TEST_CASE("finite output for extreme input") {
  AudioBuffer b{std::vector<double>(4000), 16000, "x"};
  for (std::size_t i = 0; i < b.samples.size(); ++i) b.samples[i] = (i % 2) ? 1.0 : -1.0;
  b.samples[100] = 1e-300;
  const FeatureMatrix f = log_mel(b, MelConfig{});
  for (std::size_t t = 0; t < f.num_frames(); ++t)
    for (std::size_t m = 0; m < f.frames.cols(); ++m) CHECK(std::isfinite(f.frames(t, m)));
}

TEST_CASE("shorter than a window is TooShort") {
  AudioBuffer b{std::vector<double>(100, 0.1), 16000, "s"};
  try {
    log_mel(b, MelConfig{});
    FAIL("expected TooShort");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TooShort);
  }
}

TEST_CASE("feature dump round trip") {
  const FeatureMatrix f = log_mel(noise(0.3, 5), MelConfig{});
  const auto path = std::filesystem::temp_directory_path() / "diarkit_features.melf";
  write_feature_dump(path, f);
  const Matrix back = read_feature_dump(path);
  REQUIRE(back.rows() == f.num_frames());
  REQUIRE(back.cols() == f.frames.cols());
  for (std::size_t t = 0; t < back.rows(); ++t)
    for (std::size_t m = 0; m < back.cols(); ++m)
      CHECK(back(t, m) == static_cast<double>(static_cast<float>(f.frames(t, m))));
}
