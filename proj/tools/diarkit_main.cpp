// Command-line front end. Logs go to stderr, tables and RTTM paths to stdout.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "diarkit/commands.hpp"
#include "diarkit/error.hpp"

namespace fs = std::filesystem;
using namespace diarkit;

namespace {

struct PipelineFlags {
  std::string config;
  std::optional<std::string> vad;
  std::optional<std::string> vad_labels;
  std::optional<double> vad_threshold;
  std::optional<int> vad_aggressiveness;
  std::optional<int> vad_frame_ms;
  std::optional<double> window;
  std::optional<double> stride;
  std::optional<double> min_subsegment;
  std::optional<std::string> embedder;
  std::optional<std::string> embedding_store;
  std::optional<int> embed_dim;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> clusterer;
  std::optional<int> num_speakers;
  std::optional<int> max_speakers;
  std::optional<double> ahc_threshold;
  std::optional<int> sample_rate;
  int jobs = 1;
  bool print_config = false;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
  cmd->add_option("--config", f.config, "key=value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--vad", f.vad, "speech detector")->check(CLI::IsMember({"energy", "external"}));
  cmd->add_option("--vad-labels", f.vad_labels, "label file or directory for --vad external");
  cmd->add_option("--vad-threshold", f.vad_threshold, "energy VAD threshold in [0,1]");
  cmd->add_option("--vad-aggressiveness", f.vad_aggressiveness, "VAD preset 0-3")->check(CLI::Range(0, 3));
  cmd->add_option("--vad-frame-ms", f.vad_frame_ms, "VAD frame length")->check(CLI::IsMember({10, 20, 30}));
  cmd->add_option("--window", f.window, "embedding window (s)");
  cmd->add_option("--stride", f.stride, "embedding stride (s)");
  cmd->add_option("--min-subsegment", f.min_subsegment, "shortest kept window (s)");
  cmd->add_option("--embedder", f.embedder, "embedding source")->check(CLI::IsMember({"builtin", "file"}));
  cmd->add_option("--embedding-store", f.embedding_store, "DIARKIT-EMB v1 store for --embedder file");
  cmd->add_option("--embed-dim", f.embed_dim, "builtin embedding dimension");
  cmd->add_option("--seed", f.seed, "seed for projections and k-means");
  cmd->add_option("--clusterer", f.clusterer, "clustering method")->check(CLI::IsMember({"spectral", "ahc"}));
  cmd->add_option("--num-speakers", f.num_speakers, "fix the number of speakers");
  cmd->add_option("--max-speakers", f.max_speakers, "upper bound for speaker count estimation");
  cmd->add_option("--ahc-threshold", f.ahc_threshold, "AHC fallback cosine-distance cut");
  cmd->add_option("--sample-rate", f.sample_rate, "required input sample rate");
  cmd->add_option("-j,--jobs", f.jobs, "files processed in parallel")->check(CLI::PositiveNumber);
  cmd->add_flag("--print-config", f.print_config, "write the effective configuration to stderr");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineConfig resolve(const PipelineFlags& f) {
  PipelineConfig c = f.config.empty() ? PipelineConfig{} : parse_config(read_file(f.config));
  if (f.vad) c.vad_mode = *f.vad == "energy" ? VadMode::Energy : VadMode::External;
  if (f.vad_labels) c.vad_labels = *f.vad_labels;
  if (f.vad_threshold) c.vad.threshold = *f.vad_threshold;
  if (f.vad_aggressiveness) {
    c.vad.aggressiveness = *f.vad_aggressiveness;
    if (!f.vad_threshold) c.vad.threshold.reset();
  }
  if (f.vad_frame_ms) c.vad.frame_ms = *f.vad_frame_ms;
  if (f.window) c.window.window_s = *f.window;
  if (f.stride) c.window.stride_s = *f.stride;
  if (f.min_subsegment) c.window.min_subsegment_s = *f.min_subsegment;
  if (f.embedder) {
    c.embedder.kind = *f.embedder == "builtin" ? EmbeddingProviderConfig::Kind::BuiltinPooled
                                               : EmbeddingProviderConfig::Kind::FileStore;
  }
  if (f.embedding_store) c.embedder.store_path = *f.embedding_store;
  if (f.embed_dim) c.embedder.dim = *f.embed_dim;
  if (f.seed) {
    c.seed = *f.seed;
    c.embedder.seed = *f.seed;
  }
  if (f.clusterer) c.clusterer = *f.clusterer == "spectral" ? ClustererKind::Spectral : ClustererKind::Ahc;
  if (f.num_speakers) c.num_speakers = *f.num_speakers;
  if (f.max_speakers) c.max_speakers = *f.max_speakers;
  if (f.ahc_threshold) c.ahc_threshold = *f.ahc_threshold;
  if (f.sample_rate) c.sample_rate = *f.sample_rate;
  c.validate();
  if (f.print_config) std::cerr << serialize_config(c);
  return c;
}

std::vector<fs::path> to_paths(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

void print_rows(const std::string& key, const std::vector<TableRow>& rows, bool kv) {
  std::cout << (kv ? format_key_values(rows) : format_error_table(key, rows));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diarkit: speaker diarization toolkit"};
  app.require_subcommand(1);

  PipelineFlags dflags;
  std::vector<std::string> d_inputs;
  std::string d_out = "rttm_out";
  std::string d_dump;
  auto* diarize = app.add_subcommand("diarize", "write one RTTM per input WAV");
  diarize->add_option("inputs", d_inputs, "WAV files")->required()->check(CLI::ExistingFile);
  diarize->add_option("-o,--out-dir", d_out, "output directory");
  diarize->add_option("--dump-features", d_dump, "write MELF feature dumps to this directory");
  add_pipeline_flags(diarize, dflags);

  std::string s_ref, s_hyp, s_uem;
  double s_collar = 0.0;
  bool s_kv = false;
  auto* score = app.add_subcommand("score", "DER of a hypothesis RTTM against a reference");
  score->add_option("--ref", s_ref, "reference RTTM")->required()->check(CLI::ExistingFile);
  score->add_option("--hyp", s_hyp, "hypothesis RTTM")->required()->check(CLI::ExistingFile);
  score->add_option("--uem", s_uem, "scored regions")->check(CLI::ExistingFile);
  score->add_option("--collar", s_collar, "no-score collar around reference boundaries (s)");
  score->add_flag("--kv", s_kv, "machine-readable key=value output");

  PipelineFlags vflags;
  std::vector<std::string> v_inputs;
  std::string v_ref;
  bool v_kv = false;
  auto* vad_eval = app.add_subcommand("vad-eval", "missed speech and false alarm of the VAD alone");
  vad_eval->add_option("inputs", v_inputs, "WAV files")->required()->check(CLI::ExistingFile);
  vad_eval->add_option("--ref", v_ref, "reference RTTM")->required()->check(CLI::ExistingFile);
  vad_eval->add_flag("--kv", v_kv, "machine-readable key=value output");
  add_pipeline_flags(vad_eval, vflags);

  PipelineFlags aflags;
  std::vector<std::string> a_inputs, a_values;
  std::string a_ref, a_axis;
  bool a_kv = false;
  auto* ablate = app.add_subcommand("ablate", "sweep one setting and score every value");
  ablate->add_option("inputs", a_inputs, "WAV files")->required()->check(CLI::ExistingFile);
  ablate->add_option("--ref", a_ref, "reference RTTM")->required()->check(CLI::ExistingFile);
  ablate->add_option("--axis", a_axis, "vad_threshold, aggressiveness, frame_ms, window_stride or clusterer")
      ->required();
  ablate->add_option("--values", a_values, "comma-separated values")->required()->delimiter(',');
  ablate->add_flag("--kv", a_kv, "machine-readable key=value output");
  add_pipeline_flags(ablate, aflags);

  SynthConfig synth_cfg;
  std::string y_out = ".";
  auto* synth = app.add_subcommand("synth", "generate a synthetic conversation (WAV + RTTM)");
  synth->add_option("--speakers", synth_cfg.n_speakers, "number of speakers")->check(CLI::Range(1, 8));
  synth->add_option("--duration", synth_cfg.duration_s, "length in seconds");
  synth->add_option("--seed", synth_cfg.seed, "generator seed");
  synth->add_option("--sample-rate", synth_cfg.sample_rate, "sample rate");
  synth->add_option("--name", synth_cfg.file_id, "file id and output stem");
  synth->add_option("-o,--out-dir", y_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*diarize) {
      const auto cfg = resolve(dflags);
      const auto run = run_diarize(to_paths(d_inputs), cfg, d_out, dflags.jobs, std::cerr, d_dump);
      for (const auto& p : run.written) std::cout << p.string() << '\n';
      return run.exit_code;
    }
    if (*score) {
      std::optional<fs::path> uem;
      if (!s_uem.empty()) uem = s_uem;
      const ScoreTable table = run_score(s_ref, s_hyp, uem, s_collar);
      for (const auto& w : table.warnings) std::cerr << "warning: " << w << '\n';
      if (s_kv) {
        std::vector<TableRow> rows;
        for (const auto& f : table.files) rows.push_back(to_row(f.file_id, f.report));
        rows.push_back(to_row("OVERALL", table.overall));
        std::cout << format_key_values(rows);
      } else {
        std::cout << format_score_table(table);
      }
      return 0;
    }
    if (*vad_eval) {
      const auto cfg = resolve(vflags);
      print_rows("File", run_vad_eval(to_paths(v_inputs), v_ref, cfg, vflags.jobs, std::cerr), v_kv);
      return 0;
    }
    if (*ablate) {
      const auto cfg = resolve(aflags);
      const AblationAxis axis = parse_axis(a_axis);
      print_rows(axis_column(axis),
                 run_ablate(axis, a_values, to_paths(a_inputs), a_ref, cfg, aflags.jobs, std::cerr), a_kv);
      return 0;
    }
    if (*synth) {
      const SynthFiles files = run_synth(synth_cfg, y_out);
      std::cout << files.wav.string() << '\n' << files.rttm.string() << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "diarkit: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "diarkit: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
