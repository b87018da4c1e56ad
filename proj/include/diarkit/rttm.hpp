#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diarkit/timeline.hpp"

namespace diarkit {

struct RttmRecord {
  std::string file_id;
  int channel = 1;
  double onset_s = 0.0;
  double duration_s = 0.0;
  std::string speaker;

  friend bool operator==(const RttmRecord&, const RttmRecord&) = default;
};

using RttmByFile = std::map<std::string, std::vector<RttmRecord>>;

/// Parses "SPEAKER <file> <chan> <tbeg> <tdur> <ortho> <stype> <name> <conf>
/// <slat>" lines. Blank lines, '#' / ';;' comments and other record types
/// are ignored. Throws ParseError on a wrong token count, a bad number, a
/// negative onset or a non-positive duration.
RttmByFile parse_rttm(std::string_view text);
RttmByFile read_rttm(const std::filesystem::path& path);

/// 10-field SPEAKER lines with times at millisecond precision.
std::string write_rttm(std::span<const RttmRecord> records);

Timeline records_to_timeline(std::span<const RttmRecord> records, const std::string& file_id);
std::vector<RttmRecord> timeline_to_records(const Timeline& timeline);

/// UEM lines "<file> <chan> <start> <end>", grouped by file.
std::map<std::string, Timeline> parse_uem(std::string_view text);
std::map<std::string, Timeline> read_uem(const std::filesystem::path& path);

}  // namespace diarkit
