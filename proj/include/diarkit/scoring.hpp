#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "diarkit/clustering.hpp"
#include "diarkit/matrix.hpp"
#include "diarkit/rttm.hpp"
#include "diarkit/segmentation.hpp"
#include "diarkit/timeline.hpp"

namespace diarkit {

/// Converts per-window labels into non-overlapping speaker turns. Where two
/// consecutive windows overlap, the boundary between them is the midpoint of
/// their overlap; same-label neighbours are then merged. Labels become
/// "spk<label>". Throws LengthMismatch.
Timeline assemble_hypothesis(std::span<const SubSegment> segments,
                             const ClusterAssignment& assignment, std::string file_id = {});

/// Maximum-weight one-to-one matching on a rows x cols overlap matrix
/// (Hungarian method). Returns (row, col) pairs sorted by row; exactly
/// min(rows, cols) pairs.
std::vector<std::pair<int, int>> optimal_speaker_mapping(const Matrix& overlap);

struct DerReport {
  double ms_pct = 0.0;
  double fa_pct = 0.0;
  double se_pct = 0.0;
  double der_pct = 0.0;
  double total_ref_s = 0.0;  // scored reference speaker-time
  double ms_s = 0.0;
  double fa_s = 0.0;
  double se_s = 0.0;
  std::vector<std::pair<std::string, std::string>> mapping;  // (hyp, ref)
};

/// Builds a report from summed seconds. Throws EmptyReference when
/// total_ref_s is zero.
DerReport make_report(double ms_s, double fa_s, double se_s, double total_ref_s);

struct ScoreOptions {
  const Timeline* uem = nullptr;  // scored regions; default is the joint extent
  double collar_s = 0.0;
};

/// Diarization error rate by exact interval arithmetic on 1 ms ticks.
/// Per atomic interval with r reference and h hypothesis speakers of which m
/// are optimally mapped pairs: MS += max(0, r-h), FA += max(0, h-r),
/// SE += min(r, h) - m, each weighted by duration; percentages are relative
/// to the scored reference speaker-time.
DerReport compute_der(const Timeline& ref, const Timeline& hyp, const ScoreOptions& opts = {});

struct VadScore {
  double ms_pct = 0.0;
  double fa_pct = 0.0;
  double ms_s = 0.0;
  double fa_s = 0.0;
  double total_ref_s = 0.0;
};

/// compute_der with every speaker on both sides renamed to one label.
VadScore vad_score(const Timeline& ref, const Timeline& hyp, const ScoreOptions& opts = {});

struct FileScore {
  std::string file_id;
  DerReport report;
  bool missing_hypothesis = false;
};

struct ScoreTable {
  std::vector<FileScore> files;  // sorted by file_id
  DerReport overall;             // from summed seconds, not averaged percentages
  std::vector<std::string> warnings;
};

/// Scores every reference file. A reference file with no hypothesis counts as
/// fully missed (with a warning); hypothesis files absent from the reference
/// raise FileSetMismatch naming them.
ScoreTable score_files(const RttmByFile& ref, const RttmByFile& hyp,
                       const std::map<std::string, Timeline>* uem = nullptr, double collar_s = 0.0);

struct TableRow {
  std::string name;
  double ms_pct = 0.0;
  double fa_pct = 0.0;
  double se_pct = 0.0;
  double der_pct = 0.0;
};

TableRow to_row(const std::string& name, const DerReport& report);

/// Aligned MS/FA/SE/DER table with one decimal, first column headed `key`.
std::string format_error_table(const std::string& key, std::span<const TableRow> rows);
/// "<name>.<metric>=<value>" lines with full precision.
std::string format_key_values(std::span<const TableRow> rows);
std::string format_score_table(const ScoreTable& table);

}  // namespace diarkit
