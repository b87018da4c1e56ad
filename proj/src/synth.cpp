#include "diarkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "diarkit/error.hpp"
#include "diarkit/features.hpp"
#include "diarkit/rng.hpp"

namespace diarkit {
namespace {

constexpr double kBandLoHz = 250.0;
constexpr double kBandHiHz = 6500.0;
constexpr double kBandGuard = 0.15;
constexpr double kNoiseRms = 0.0005;
constexpr double kFadeS = 0.02;
constexpr double kModDepth = 0.8;

struct Voice {
  std::vector<double> track;  // unit-RMS band-limited noise, one per file
  double level = 0.1;
  double mod_hz = 4.0;
};

// Gaussian noise with every FFT bin outside [lo, hi) zeroed.
std::vector<double> band_noise(std::size_t n, double lo, double hi, int sr, SplitMix64& rng) {
  std::size_t size = 1;
  while (size < n) size <<= 1;
  std::vector<std::complex<double>> spec(size);
  for (std::size_t i = 0; i < n; ++i) spec[i] = rng.normal();
  fft_inplace(spec);
  for (std::size_t k = 0; k < size; ++k) {
    const std::size_t bin = std::min(k, size - k);
    const double f = static_cast<double>(bin) * sr / static_cast<double>(size);
    if (f < lo || f >= hi) spec[k] = 0.0;
  }
  // inverse transform through conjugation; the 1/size factor cancels in the normalisation below
  for (auto& z : spec) z = std::conj(z);
  fft_inplace(spec);
  std::vector<double> out(n);
  double power = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = spec[i].real();
    power += out[i] * out[i];
  }
  const double norm = power > 0.0 ? std::sqrt(static_cast<double>(n) / power) : 0.0;
  for (auto& x : out) x *= norm;
  return out;
}

Voice make_voice(int speaker, int n_speakers, std::size_t n, int sr, std::uint64_t seed) {
  SplitMix64 rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(speaker)));
  const auto [lo, hi] = speaker_band(speaker, n_speakers);
  Voice v;
  v.level = rng.uniform(0.08, 0.15);
  v.mod_hz = rng.uniform(3.0, 5.0);
  v.track = band_noise(n, lo, hi, sr, rng);
  return v;
}

double round_ms(double t) { return std::round(t * 1000.0) / 1000.0; }

struct Turn {
  int speaker;
  double start;
  double end;
};

std::vector<Turn> plan_turns(const SynthConfig& cfg, SplitMix64& rng) {
  std::vector<int> intro(static_cast<std::size_t>(cfg.n_speakers));
  std::iota(intro.begin(), intro.end(), 0);
  for (std::size_t i = intro.size(); i > 1; --i) std::swap(intro[i - 1], intro[rng.below(i)]);

  std::vector<Turn> turns;
  double t = round_ms(rng.uniform(0.3, 1.0));
  const double limit = cfg.duration_s - 0.1;
  while (true) {
    int speaker;
    if (turns.size() < intro.size()) {
      speaker = intro[turns.size()];
    } else if (cfg.n_speakers == 1) {
      speaker = 0;
    } else {
      const int prev = turns.back().speaker;
      speaker = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.n_speakers - 1)));
      if (speaker >= prev) ++speaker;
    }
    double len = round_ms(rng.uniform(2.0, 6.0));
    if (t + len > limit) len = round_ms(limit - t);
    if (len < 2.0) break;
    turns.push_back({speaker, t, t + len});
    t = round_ms(t + len + rng.uniform(0.3, 1.0));
  }
  return turns;
}

// Syllabic amplitude modulation with raised-cosine fades at both ends.
void render_turn(const Voice& v, const Turn& turn, int sr, SplitMix64& rng, std::vector<double>& out) {
  const auto first = static_cast<std::size_t>(std::llround(turn.start * sr));
  const auto last = std::min(out.size(), static_cast<std::size_t>(std::llround(turn.end * sr)));
  if (last <= first) return;
  const std::size_t n = last - first;
  const double mod_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const auto fade = static_cast<std::size_t>(kFadeS * sr);

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    double env = 1.0 - kModDepth * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * v.mod_hz * t + mod_phase));
    if (i < fade) env *= 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) / fade);
    if (n - i <= fade) env *= 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(n - i) / fade);
    out[first + i] += v.level * env * v.track[first + i];
  }
}

}  // namespace

void SynthConfig::validate() const {
  if (n_speakers < 1 || n_speakers > 8) throw Error(Errc::BadParams, "synth speakers must be 1..8");
  if (!(duration_s >= 2.5)) throw Error(Errc::BadParams, "synth duration must be at least 2.5 s");
  if (sample_rate < 8000) throw Error(Errc::BadParams, "synth sample rate must be >= 8000");
  if (file_id.empty()) throw Error(Errc::BadParams, "synth file id is empty");
}

std::pair<double, double> speaker_band(int speaker, int n_speakers) {
  const double lo = hz_to_mel(kBandLoHz);
  const double width = (hz_to_mel(kBandHiHz) - lo) / n_speakers;
  const double a = lo + width * (speaker + kBandGuard);
  const double b = lo + width * (speaker + 1 - kBandGuard);
  return {mel_to_hz(a), mel_to_hz(b)};
}

SynthResult synthesize_conversation(const SynthConfig& cfg) {
  cfg.validate();
  SplitMix64 rng(cfg.seed);
  const auto turns = plan_turns(cfg, rng);

  SynthResult out;
  out.audio.sample_rate = cfg.sample_rate;
  out.audio.source_id = cfg.file_id;
  out.audio.samples.resize(static_cast<std::size_t>(std::llround(cfg.duration_s * cfg.sample_rate)));

  SplitMix64 noise(derive_seed(cfg.seed, 1));
  for (auto& x : out.audio.samples) x = kNoiseRms * noise.normal();

  std::vector<Voice> voices;
  for (int s = 0; s < cfg.n_speakers; ++s) voices.push_back(make_voice(s, cfg.n_speakers, out.audio.samples.size(), cfg.sample_rate, cfg.seed));

  SplitMix64 phases(derive_seed(cfg.seed, 2));
  for (const auto& turn : turns) {
    render_turn(voices[static_cast<std::size_t>(turn.speaker)], turn, cfg.sample_rate, phases,
                out.audio.samples);
    out.reference.push_back({cfg.file_id, 1, turn.start, round_ms(turn.end - turn.start),
                             "S" + std::to_string(turn.speaker + 1)});
  }
  return out;
}

}  // namespace diarkit
