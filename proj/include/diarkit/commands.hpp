#pragma once

// Batch operations behind the `diarkit` subcommands. Each returns data and
// writes human-oriented logging to `log`; tables are formatted by the caller.

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "diarkit/pipeline.hpp"
#include "diarkit/scoring.hpp"
#include "diarkit/synth.hpp"

namespace diarkit {

struct FileOutcome {
  std::filesystem::path input;
  std::string file_id;
  std::vector<RttmRecord> records;
  Timeline speech;
  bool ok = false;
  std::string error;
};

/// Diarizes every input, up to `jobs` files at a time. Outcomes come back in
/// input order; failures are recorded, never thrown.
std::vector<FileOutcome> diarize_files(const std::vector<std::filesystem::path>& inputs,
                                       const PipelineConfig& cfg, int jobs, std::ostream& log,
                                       const std::filesystem::path& dump_features_dir = {});

struct DiarizeRun {
  std::vector<FileOutcome> outcomes;
  std::vector<std::filesystem::path> written;
  int exit_code = 0;
};

/// diarize_files + one <stem>.rttm per successful input in out_dir.
DiarizeRun run_diarize(const std::vector<std::filesystem::path>& inputs, const PipelineConfig& cfg,
                       const std::filesystem::path& out_dir, int jobs, std::ostream& log,
                       const std::filesystem::path& dump_features_dir = {});

ScoreTable run_score(const std::filesystem::path& ref_rttm, const std::filesystem::path& hyp_rttm,
                     const std::optional<std::filesystem::path>& uem, double collar_s);

struct SynthFiles {
  std::filesystem::path wav;
  std::filesystem::path rttm;
};
SynthFiles run_synth(const SynthConfig& cfg, const std::filesystem::path& out_dir);

/// VAD-only MS/FA per file plus an OVERALL row.
std::vector<TableRow> run_vad_eval(const std::vector<std::filesystem::path>& inputs,
                                   const std::filesystem::path& ref_rttm, const PipelineConfig& cfg,
                                   int jobs, std::ostream& log);

enum class AblationAxis { VadThreshold, Aggressiveness, FrameMs, WindowStride, Clusterer };

AblationAxis parse_axis(const std::string& name);
std::string axis_name(AblationAxis axis);

/// Applies one ablation value ("0.25", "2", "2.0:0.4", "ahc", ...) to cfg.
/// Returns the row label. Throws BadParams for values the axis rejects.
std::string apply_ablation_value(PipelineConfig& cfg, AblationAxis axis, const std::string& value);

/// Re-runs diarize + score for every value; one OVERALL row per value.
std::vector<TableRow> run_ablate(AblationAxis axis, const std::vector<std::string>& values,
                                 const std::vector<std::filesystem::path>& inputs,
                                 const std::filesystem::path& ref_rttm, const PipelineConfig& cfg,
                                 int jobs, std::ostream& log);

/// Column header used for an axis in ablation tables.
std::string axis_column(AblationAxis axis);

}  // namespace diarkit
