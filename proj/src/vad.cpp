#include "diarkit/vad.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "diarkit/error.hpp"
#include "text_util.hpp"

namespace diarkit {
namespace {

// -100 dBFS; quieter frames are treated as this level.
constexpr double kRmsFloor = 1e-5;
// Frames whose log-energy spread is below this are one energy level.
constexpr double kFlatSpread = 1e-6;

struct Preset {
  double threshold;
  int hangover;
};
constexpr Preset kPresets[] = {{0.30, 10}, {0.45, 8}, {0.60, 5}, {0.75, 2}};

}  // namespace

void VadConfig::validate() const {
  if (threshold && !(*threshold >= 0.0 && *threshold <= 1.0)) {
    throw Error(Errc::BadParams, "VAD threshold must lie in [0, 1]");
  }
  if (frame_ms != 10 && frame_ms != 20 && frame_ms != 30) {
    throw Error(Errc::BadParams, "VAD frame must be 10, 20 or 30 ms, got " + std::to_string(frame_ms));
  }
  if (aggressiveness && (*aggressiveness < 0 || *aggressiveness > 3)) {
    throw Error(Errc::BadLevel, "aggressiveness must be 0..3, got " + std::to_string(*aggressiveness));
  }
  if (hangover_frames < 0) throw Error(Errc::BadParams, "hangover_frames must be >= 0");
  if (!(min_speech_s >= 0.0) || !(merge_gap_s >= 0.0)) {
    throw Error(Errc::BadParams, "min_speech_s and merge_gap_s must be >= 0");
  }
}

std::vector<double> energy_vad_frames(const AudioBuffer& buf, const VadConfig& cfg) {
  cfg.validate();
  const auto frame_len = static_cast<std::size_t>(std::llround(cfg.frame_ms * buf.sample_rate / 1000.0));
  const std::size_t frames = frame_len == 0 ? 0 : buf.samples.size() / frame_len;
  if (frames == 0) {
    throw Error(Errc::TooShort, "audio shorter than one " + std::to_string(cfg.frame_ms) + " ms VAD frame");
  }

  std::vector<double> energy(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double sum = 0.0;
    for (std::size_t i = f * frame_len; i < (f + 1) * frame_len; ++i) sum += buf.samples[i] * buf.samples[i];
    const double rms = std::sqrt(sum / static_cast<double>(frame_len));
    energy[f] = std::log(std::max(rms, kRmsFloor));
  }

  const auto [lo, hi] = std::minmax_element(energy.begin(), energy.end());
  const double low = *lo;
  const double spread = *hi - low;
  std::vector<double> probs(frames, 0.0);
  if (spread <= kFlatSpread) return probs;
  for (std::size_t f = 0; f < frames; ++f) probs[f] = std::clamp((energy[f] - low) / spread, 0.0, 1.0);
  return probs;
}

Timeline frames_to_regions(std::span<const double> probs, const VadConfig& cfg, std::string file_id) {
  cfg.validate();
  const double threshold = cfg.effective_threshold();
  const std::size_t n = probs.size();
  const auto hangover = static_cast<std::size_t>(cfg.hangover_frames);

  // Speech runs in frame units, extended by the hangover.
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t f = 0; f < n;) {
    if (!(probs[f] >= threshold)) {
      ++f;
      continue;
    }
    std::size_t end = f;
    while (end < n && probs[end] >= threshold) ++end;
    const std::size_t extended = std::min(n, end + hangover);
    if (!runs.empty() && f <= runs.back().second) {
      runs.back().second = std::max(runs.back().second, extended);
    } else {
      runs.emplace_back(f, extended);
    }
    f = end;
  }

  const double frame_s = cfg.frame_s();
  std::vector<std::pair<std::size_t, std::size_t>> merged;
  for (const auto& run : runs) {
    if (!merged.empty()) {
      const double gap = static_cast<double>(run.first - merged.back().second) * frame_s;
      if (gap < cfg.merge_gap_s - 1e-9) {
        merged.back().second = run.second;
        continue;
      }
    }
    merged.push_back(run);
  }

  Timeline out{std::move(file_id), {}};
  for (const auto& [first, last] : merged) {
    const double start = static_cast<double>(first) * frame_s;
    const double end = static_cast<double>(last) * frame_s;
    if (end - start < cfg.min_speech_s - 1e-9) continue;
    out.intervals.push_back({start, end, ""});
  }
  return out;
}

VadConfig apply_aggressiveness(VadConfig cfg) {
  if (!cfg.aggressiveness) return cfg;
  const int level = *cfg.aggressiveness;
  if (level < 0 || level > 3) {
    throw Error(Errc::BadLevel, "aggressiveness must be 0..3, got " + std::to_string(level));
  }
  const Preset& preset = kPresets[level];
  if (!cfg.threshold) cfg.threshold = preset.threshold;
  cfg.hangover_frames = preset.hangover;
  return cfg;
}

Timeline run_energy_vad(const AudioBuffer& buf, const VadConfig& cfg) {
  const VadConfig resolved = apply_aggressiveness(cfg);
  const auto probs = energy_vad_frames(buf, resolved);
  return frames_to_regions(probs, resolved, buf.source_id);
}

Timeline parse_external_vad(std::string_view text, const std::string& file_id) {
  Timeline raw{file_id, {}};
  text::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') return;
    const auto tok = text::split_ws(trimmed);
    double start = 0.0;
    double end = 0.0;
    if (tok[0] == "SPEAKER") {
      if (tok.size() < 5) throw ParseError(line_no, "RTTM line needs at least 5 fields");
      if (!file_id.empty() && tok[1] != file_id) return;
      const auto onset = text::to_double(tok[3]);
      const auto dur = text::to_double(tok[4]);
      if (!onset || !dur) throw ParseError(line_no, "non-numeric RTTM time");
      start = *onset;
      end = *onset + *dur;
    } else {
      if (tok.size() < 2 || tok.size() > 3) throw ParseError(line_no, "expected 'start end'");
      const auto s = text::to_double(tok[0]);
      const auto e = text::to_double(tok[1]);
      if (!s || !e) throw ParseError(line_no, "non-numeric time");
      start = *s;
      end = *e;
    }
    if (start < 0.0) throw ParseError(line_no, "negative start time");
    if (!(end > start)) throw ParseError(line_no, "end must be after start");
    raw.intervals.push_back({start, end, ""});
  });
  return merge_to_speech(raw);
}

Timeline load_external_vad(const std::filesystem::path& path, const std::string& file_id) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_external_vad(ss.str(), file_id);
}

}  // namespace diarkit
