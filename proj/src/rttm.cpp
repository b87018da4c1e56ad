#include "diarkit/rttm.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

#include "diarkit/error.hpp"
#include "text_util.hpp"

namespace diarkit {
namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_comment(std::string_view line) { return line.starts_with('#') || line.starts_with(";;"); }

}  // namespace

RttmByFile parse_rttm(std::string_view content) {
  RttmByFile out;
  text::for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || is_comment(trimmed)) return;
    const auto tok = text::split_ws(trimmed);
    if (tok[0] != "SPEAKER") return;
    if (tok.size() != 10) {
      throw ParseError(line_no, "SPEAKER line has " + std::to_string(tok.size()) + " fields, expected 10");
    }
    const auto channel = text::to_int<int>(tok[2]);
    if (!channel) throw ParseError(line_no, "channel is not an integer");
    const auto onset = text::to_double(tok[3]);
    const auto duration = text::to_double(tok[4]);
    if (!onset) throw ParseError(line_no, "onset is not a number");
    if (!duration) throw ParseError(line_no, "duration is not a number");
    if (*onset < 0.0) throw ParseError(line_no, "negative onset");
    if (!(*duration > 0.0)) throw ParseError(line_no, "duration must be positive");
    RttmRecord rec{std::string(tok[1]), *channel, *onset, *duration, std::string(tok[7])};
    out[rec.file_id].push_back(std::move(rec));
  });
  return out;
}

RttmByFile read_rttm(const std::filesystem::path& path) { return parse_rttm(slurp(path)); }

std::string write_rttm(std::span<const RttmRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += fmt::format("SPEAKER {} {} {:.3f} {:.3f} <NA> <NA> {} <NA> <NA>\n", r.file_id, r.channel, r.onset_s,
                       r.duration_s, r.speaker);
  }
  return out;
}

Timeline records_to_timeline(std::span<const RttmRecord> records, const std::string& file_id) {
  Timeline t{file_id, {}};
  for (const auto& r : records) {
    if (r.file_id == file_id) t.intervals.push_back({r.onset_s, r.onset_s + r.duration_s, r.speaker});
  }
  sort_intervals(t);
  return t;
}

std::vector<RttmRecord> timeline_to_records(const Timeline& timeline) {
  std::vector<RttmRecord> out;
  out.reserve(timeline.intervals.size());
  for (const auto& iv : timeline.intervals) {
    out.push_back({timeline.file_id, 1, iv.start, iv.end - iv.start, iv.label});
  }
  return out;
}

std::map<std::string, Timeline> parse_uem(std::string_view content) {
  std::map<std::string, Timeline> raw;
  text::for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || is_comment(trimmed)) return;
    const auto tok = text::split_ws(trimmed);
    if (tok.size() != 4) throw ParseError(line_no, "UEM line needs '<file> <chan> <start> <end>'");
    const auto start = text::to_double(tok[2]);
    const auto end = text::to_double(tok[3]);
    if (!start || !end) throw ParseError(line_no, "non-numeric UEM time");
    if (*start < 0.0 || !(*end > *start)) throw ParseError(line_no, "UEM end must follow a non-negative start");
    auto& t = raw[std::string(tok[0])];
    t.file_id = std::string(tok[0]);
    t.intervals.push_back({*start, *end, ""});
  });
  std::map<std::string, Timeline> out;
  for (const auto& [file, t] : raw) out[file] = merge_to_speech(t);
  return out;
}

std::map<std::string, Timeline> read_uem(const std::filesystem::path& path) { return parse_uem(slurp(path)); }

}  // namespace diarkit
