#include <string>

#include "diarkit/error.hpp"
#include "diarkit/pipeline.hpp"
#include "text_util.hpp"

namespace diarkit {
namespace {

constexpr std::string_view kNone = "none";

double need_double(std::string_view key, std::string_view value) {
  const auto v = text::to_double(value);
  if (!v) throw ParseError(0, std::string(key) + ": '" + std::string(value) + "' is not a number");
  return *v;
}

template <typename Int>
Int need_int(std::string_view key, std::string_view value) {
  const auto v = text::to_int<Int>(value);
  if (!v) throw ParseError(0, std::string(key) + ": '" + std::string(value) + "' is not an integer");
  return *v;
}

template <typename Int>
std::optional<Int> optional_int(std::string_view key, std::string_view value) {
  if (value == kNone || value.empty()) return std::nullopt;
  return need_int<Int>(key, value);
}

std::string opt_text(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(kNone); }
std::string opt_text(const std::optional<double>& v) { return v ? text::shortest(*v) : std::string(kNone); }

}  // namespace

VadConfig PipelineConfig::default_vad() {
  VadConfig vad;
  vad.threshold = 0.30;
  vad.frame_ms = 20;
  vad.hangover_frames = 2;
  vad.min_speech_s = 0.2;
  vad.merge_gap_s = 0.3;
  return vad;
}

void PipelineConfig::validate() const {
  mel.validate(sample_rate);
  vad.validate();
  window.validate();
  embedder.validate();
  if (vad_mode == VadMode::External && vad_labels.empty()) {
    throw Error(Errc::BadParams, "external VAD needs a labels path");
  }
  if (num_speakers && *num_speakers < 1) throw Error(Errc::BadParams, "num_speakers must be >= 1");
  if (max_speakers < 1) throw Error(Errc::BadParams, "max_speakers must be >= 1");
  if (!(ahc_threshold >= 0.0 && ahc_threshold <= 2.0)) throw Error(Errc::BadParams, "ahc_threshold must lie in [0, 2]");
}

std::string serialize_config(const PipelineConfig& c) {
  std::string out;
  auto put = [&](std::string_view key, const std::string& value) {
    out.append(key);
    out += '=';
    out += value;
    out += '\n';
  };
  put("sample_rate", std::to_string(c.sample_rate));
  put("mel.n_mels", std::to_string(c.mel.n_mels));
  put("mel.win_ms", text::shortest(c.mel.win_ms));
  put("mel.hop_ms", text::shortest(c.mel.hop_ms));
  put("mel.fft_size", std::to_string(c.mel.fft_size));
  put("mel.f_min", text::shortest(c.mel.f_min));
  put("mel.f_max", text::shortest(c.mel.f_max));
  put("mel.log_floor", text::shortest(c.mel.log_floor));
  put("vad.mode", c.vad_mode == VadMode::Energy ? "energy" : "external");
  put("vad.labels", c.vad_labels.string());
  put("vad.threshold", opt_text(c.vad.threshold));
  put("vad.frame_ms", std::to_string(c.vad.frame_ms));
  put("vad.aggressiveness", opt_text(c.vad.aggressiveness));
  put("vad.hangover_frames", std::to_string(c.vad.hangover_frames));
  put("vad.min_speech_s", text::shortest(c.vad.min_speech_s));
  put("vad.merge_gap_s", text::shortest(c.vad.merge_gap_s));
  put("segment.window_s", text::shortest(c.window.window_s));
  put("segment.stride_s", text::shortest(c.window.stride_s));
  put("segment.min_subsegment_s", text::shortest(c.window.min_subsegment_s));
  put("embed.kind", c.embedder.kind == EmbeddingProviderConfig::Kind::BuiltinPooled ? "builtin" : "file");
  put("embed.dim", std::to_string(c.embedder.dim));
  put("embed.seed", std::to_string(c.embedder.seed));
  put("embed.store", c.embedder.store_path.string());
  put("cluster.method", c.clusterer == ClustererKind::Spectral ? "spectral" : "ahc");
  put("cluster.num_speakers", opt_text(c.num_speakers));
  put("cluster.max_speakers", std::to_string(c.max_speakers));
  put("cluster.ahc_threshold", text::shortest(c.ahc_threshold));
  put("seed", std::to_string(c.seed));
  return out;
}

void apply_config_value(PipelineConfig& c, std::string_view key, std::string_view value) {
  if (key == "sample_rate") c.sample_rate = need_int<int>(key, value);
  else if (key == "mel.n_mels") c.mel.n_mels = need_int<int>(key, value);
  else if (key == "mel.win_ms") c.mel.win_ms = need_double(key, value);
  else if (key == "mel.hop_ms") c.mel.hop_ms = need_double(key, value);
  else if (key == "mel.fft_size") c.mel.fft_size = need_int<int>(key, value);
  else if (key == "mel.f_min") c.mel.f_min = need_double(key, value);
  else if (key == "mel.f_max") c.mel.f_max = need_double(key, value);
  else if (key == "mel.log_floor") c.mel.log_floor = need_double(key, value);
  else if (key == "vad.mode") {
    if (value == "energy") c.vad_mode = VadMode::Energy;
    else if (value == "external") c.vad_mode = VadMode::External;
    else throw ParseError(0, "vad.mode must be energy or external");
  } else if (key == "vad.labels") c.vad_labels = std::string(value);
  else if (key == "vad.threshold") {
    c.vad.threshold = (value == kNone || value.empty()) ? std::nullopt : std::optional(need_double(key, value));
  } else if (key == "vad.frame_ms") c.vad.frame_ms = need_int<int>(key, value);
  else if (key == "vad.aggressiveness") c.vad.aggressiveness = optional_int<int>(key, value);
  else if (key == "vad.hangover_frames") c.vad.hangover_frames = need_int<int>(key, value);
  else if (key == "vad.min_speech_s") c.vad.min_speech_s = need_double(key, value);
  else if (key == "vad.merge_gap_s") c.vad.merge_gap_s = need_double(key, value);
  else if (key == "segment.window_s") c.window.window_s = need_double(key, value);
  else if (key == "segment.stride_s") c.window.stride_s = need_double(key, value);
  else if (key == "segment.min_subsegment_s") c.window.min_subsegment_s = need_double(key, value);
  else if (key == "embed.kind") {
    if (value == "builtin") c.embedder.kind = EmbeddingProviderConfig::Kind::BuiltinPooled;
    else if (value == "file") c.embedder.kind = EmbeddingProviderConfig::Kind::FileStore;
    else throw ParseError(0, "embed.kind must be builtin or file");
  } else if (key == "embed.dim") c.embedder.dim = need_int<int>(key, value);
  else if (key == "embed.seed") c.embedder.seed = need_int<std::uint64_t>(key, value);
  else if (key == "embed.store") c.embedder.store_path = std::string(value);
  else if (key == "cluster.method") {
    if (value == "spectral") c.clusterer = ClustererKind::Spectral;
    else if (value == "ahc") c.clusterer = ClustererKind::Ahc;
    else throw ParseError(0, "cluster.method must be spectral or ahc");
  } else if (key == "cluster.num_speakers") c.num_speakers = optional_int<int>(key, value);
  else if (key == "cluster.max_speakers") c.max_speakers = need_int<int>(key, value);
  else if (key == "cluster.ahc_threshold") c.ahc_threshold = need_double(key, value);
  else if (key == "seed") c.seed = need_int<std::uint64_t>(key, value);
  else throw ParseError(0, "unknown config key '" + std::string(key) + "'");
}

PipelineConfig parse_config(std::string_view content) {
  PipelineConfig cfg;
  text::for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') return;
    const auto eq = trimmed.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value");
    try {
      apply_config_value(cfg, text::trim(trimmed.substr(0, eq)), text::trim(trimmed.substr(eq + 1)));
    } catch (const ParseError& e) {
      throw ParseError(line_no, e.reason());
    }
  });
  return cfg;
}

}  // namespace diarkit
