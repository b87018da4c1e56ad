#include "diarkit/commands.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "diarkit/error.hpp"
#include "text_util.hpp"

namespace diarkit {
namespace {

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

RttmByFile restrict_to(const RttmByFile& ref, const std::vector<FileOutcome>& outcomes) {
  RttmByFile out;
  for (const auto& o : outcomes) {
    auto it = ref.find(o.file_id);
    out[o.file_id] = it == ref.end() ? std::vector<RttmRecord>{} : it->second;
  }
  return out;
}

// Runs `body(i)` for every input with up to `jobs` threads, keeping the
// per-file notes so they can be logged in input order afterwards.
template <typename Body>
std::vector<std::vector<std::string>> for_each_input(std::size_t n, int jobs, Body body) {
  std::vector<std::vector<std::string>> notes(n);
  const int threads = std::max(1, jobs);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    body(static_cast<std::size_t>(i), notes[static_cast<std::size_t>(i)]);
  }
  return notes;
}

}  // namespace

std::vector<FileOutcome> diarize_files(const std::vector<std::filesystem::path>& inputs,
                                       const PipelineConfig& cfg, int jobs, std::ostream& log,
                                       const std::filesystem::path& dump_features_dir) {
  cfg.validate();
  const auto provider = make_provider(cfg);
  if (!dump_features_dir.empty()) std::filesystem::create_directories(dump_features_dir);

  std::vector<FileOutcome> outcomes(inputs.size());
  const auto notes = for_each_input(inputs.size(), jobs, [&](std::size_t i, std::vector<std::string>& note) {
    FileOutcome& o = outcomes[i];
    o.input = inputs[i];
    o.file_id = inputs[i].stem().string();
    try {
      bool downmixed = false;
      const AudioBuffer audio = load_mono(inputs[i], cfg.sample_rate, &downmixed);
      if (downmixed) note.push_back("note: " + o.file_id + " has several channels, averaged to mono");
      DiarizeResult r = diarize_buffer(audio, cfg, nullptr, provider.get());
      if (!dump_features_dir.empty() && r.features.num_frames() > 0) {
        write_feature_dump(dump_features_dir / (o.file_id + ".melf"), r.features);
      }
      if (r.speech.intervals.empty()) note.push_back("warning: no speech detected in " + o.file_id);
      o.records = std::move(r.records);
      o.speech = std::move(r.speech);
      o.ok = true;
      note.push_back(o.file_id + ": " + std::to_string(r.num_speakers) + " speaker(s), " +
                     std::to_string(o.records.size()) + " turn(s)");
    } catch (const std::exception& e) {
      o.error = e.what();
      note.push_back("error: " + o.file_id + ": " + o.error);
    }
  });
  for (const auto& lines : notes) {
    for (const auto& line : lines) log << line << '\n';
  }
  return outcomes;
}

DiarizeRun run_diarize(const std::vector<std::filesystem::path>& inputs, const PipelineConfig& cfg,
                       const std::filesystem::path& out_dir, int jobs, std::ostream& log,
                       const std::filesystem::path& dump_features_dir) {
  DiarizeRun run;
  run.outcomes = diarize_files(inputs, cfg, jobs, log, dump_features_dir);
  std::filesystem::create_directories(out_dir);
  for (const auto& o : run.outcomes) {
    if (!o.ok) {
      run.exit_code = 1;
      continue;
    }
    const auto path = out_dir / (o.file_id + ".rttm");
    write_text(path, write_rttm(o.records));
    run.written.push_back(path);
  }
  return run;
}

ScoreTable run_score(const std::filesystem::path& ref_rttm, const std::filesystem::path& hyp_rttm,
                     const std::optional<std::filesystem::path>& uem, double collar_s) {
  const RttmByFile ref = read_rttm(ref_rttm);
  const RttmByFile hyp = read_rttm(hyp_rttm);
  if (uem) {
    const auto regions = read_uem(*uem);
    return score_files(ref, hyp, &regions, collar_s);
  }
  return score_files(ref, hyp, nullptr, collar_s);
}

SynthFiles run_synth(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
  const SynthResult synth = synthesize_conversation(cfg);
  std::filesystem::create_directories(out_dir);
  SynthFiles files{out_dir / (cfg.file_id + ".wav"), out_dir / (cfg.file_id + ".rttm")};
  write_wav_pcm16(files.wav, synth.audio);
  write_text(files.rttm, write_rttm(synth.reference));
  return files;
}

std::vector<TableRow> run_vad_eval(const std::vector<std::filesystem::path>& inputs,
                                   const std::filesystem::path& ref_rttm, const PipelineConfig& cfg,
                                   int jobs, std::ostream& log) {
  cfg.validate();
  const RttmByFile ref = read_rttm(ref_rttm);
  std::vector<VadScore> scores(inputs.size());
  std::vector<std::string> ids(inputs.size());
  std::vector<std::string> errors(inputs.size());

  const auto notes = for_each_input(inputs.size(), jobs, [&](std::size_t i, std::vector<std::string>&) {
    ids[i] = inputs[i].stem().string();
    try {
      const AudioBuffer audio = load_mono(inputs[i], cfg.sample_rate);
      const Timeline speech = detect_speech(audio, cfg);
      auto it = ref.find(ids[i]);
      if (it == ref.end()) throw Error(Errc::FileSetMismatch, "no reference turns for " + ids[i]);
      scores[i] = vad_score(records_to_timeline(it->second, ids[i]), speech);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  (void)notes;

  std::vector<TableRow> rows;
  double ms = 0.0, fa = 0.0, total = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!errors[i].empty()) {
      log << "error: " << ids[i] << ": " << errors[i] << '\n';
      continue;
    }
    const auto& s = scores[i];
    rows.push_back({ids[i], s.ms_pct, s.fa_pct, 0.0, s.ms_pct + s.fa_pct});
    ms += s.ms_s;
    fa += s.fa_s;
    total += s.total_ref_s;
  }
  if (total <= 0.0) throw Error(Errc::EmptyReference, "nothing to score");
  const DerReport overall = make_report(ms, fa, 0.0, total);
  rows.push_back(to_row("OVERALL", overall));
  return rows;
}

AblationAxis parse_axis(const std::string& name) {
  if (name == "vad_threshold" || name == "threshold") return AblationAxis::VadThreshold;
  if (name == "aggressiveness") return AblationAxis::Aggressiveness;
  if (name == "frame_ms") return AblationAxis::FrameMs;
  if (name == "window_stride" || name == "window") return AblationAxis::WindowStride;
  if (name == "clusterer") return AblationAxis::Clusterer;
  throw Error(Errc::BadParams, "unknown ablation axis '" + name + "'");
}

std::string axis_name(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::VadThreshold: return "vad_threshold";
    case AblationAxis::Aggressiveness: return "aggressiveness";
    case AblationAxis::FrameMs: return "frame_ms";
    case AblationAxis::WindowStride: return "window_stride";
    case AblationAxis::Clusterer: return "clusterer";
  }
  return {};
}

std::string axis_column(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::VadThreshold: return "Threshold";
    case AblationAxis::Aggressiveness: return "Aggressiveness";
    case AblationAxis::FrameMs: return "Frame (ms)";
    case AblationAxis::WindowStride: return "Window/Stride (s)";
    case AblationAxis::Clusterer: return "Clusterer";
  }
  return {};
}

std::string apply_ablation_value(PipelineConfig& cfg, AblationAxis axis, const std::string& value) {
  auto number = [&](std::string_view v) {
    const auto d = text::to_double(text::trim(v));
    if (!d) throw Error(Errc::BadParams, "'" + std::string(v) + "' is not a number");
    return *d;
  };
  switch (axis) {
    case AblationAxis::VadThreshold:
      cfg.vad_mode = VadMode::Energy;
      cfg.vad.threshold = number(value);
      cfg.vad.aggressiveness.reset();
      return text::shortest(*cfg.vad.threshold);
    case AblationAxis::Aggressiveness: {
      const auto level = text::to_int<int>(text::trim(value));
      if (!level) throw Error(Errc::BadParams, "'" + value + "' is not an aggressiveness level");
      cfg.vad_mode = VadMode::Energy;
      cfg.vad.threshold.reset();
      cfg.vad.aggressiveness = *level;
      return std::to_string(*level);
    }
    case AblationAxis::FrameMs: {
      const auto ms = text::to_int<int>(text::trim(value));
      if (!ms) throw Error(Errc::BadParams, "'" + value + "' is not a frame duration");
      cfg.vad.frame_ms = *ms;
      return std::to_string(*ms);
    }
    case AblationAxis::WindowStride: {
      const auto colon = value.find(':');
      if (colon == std::string::npos) throw Error(Errc::BadParams, "window/stride values look like 2.0:0.4");
      cfg.window.window_s = number(std::string_view(value).substr(0, colon));
      cfg.window.stride_s = number(std::string_view(value).substr(colon + 1));
      return text::shortest(cfg.window.window_s) + "/" + text::shortest(cfg.window.stride_s);
    }
    case AblationAxis::Clusterer:
      if (value == "spectral" || value == "sc" || value == "SC") {
        cfg.clusterer = ClustererKind::Spectral;
        return "SC";
      }
      if (value == "ahc" || value == "AHC") {
        cfg.clusterer = ClustererKind::Ahc;
        return "AHC";
      }
      throw Error(Errc::BadParams, "clusterer must be spectral or ahc");
  }
  return value;
}

std::vector<TableRow> run_ablate(AblationAxis axis, const std::vector<std::string>& values,
                                 const std::vector<std::filesystem::path>& inputs,
                                 const std::filesystem::path& ref_rttm, const PipelineConfig& cfg,
                                 int jobs, std::ostream& log) {
  if (values.empty()) throw Error(Errc::BadParams, "ablation needs at least one value");
  const RttmByFile ref = read_rttm(ref_rttm);
  std::vector<TableRow> rows;
  for (const auto& value : values) {
    PipelineConfig trial = cfg;
    const std::string label = apply_ablation_value(trial, axis, value);
    trial.validate();
    log << axis_name(axis) << " = " << label << '\n';
    const auto outcomes = diarize_files(inputs, trial, jobs, log);
    RttmByFile hyp;
    for (const auto& o : outcomes) {
      if (!o.ok) throw Error(Errc::Io, "ablation run failed on " + o.file_id + ": " + o.error);
      hyp[o.file_id] = o.records;
    }
    const ScoreTable table = score_files(restrict_to(ref, outcomes), hyp);
    for (const auto& w : table.warnings) log << "warning: " << w << '\n';
    rows.push_back(to_row(label, table.overall));
  }
  return rows;
}

}  // namespace diarkit
