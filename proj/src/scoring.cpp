#include "diarkit/scoring.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "diarkit/error.hpp"
#include "text_util.hpp"

namespace diarkit {

Timeline assemble_hypothesis(std::span<const SubSegment> segments, const ClusterAssignment& assignment,
                             std::string file_id) {
  if (segments.size() != assignment.labels.size()) {
    throw Error(Errc::LengthMismatch, std::to_string(segments.size()) + " subsegments but " +
                                          std::to_string(assignment.labels.size()) + " labels");
  }
  const std::size_t n = segments.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return segments[a].start != segments[b].start ? segments[a].start < segments[b].start
                                                   : segments[a].end < segments[b].end;
  });

  Timeline out{std::move(file_id), {}};
  double prev_hi = -std::numeric_limits<double>::infinity();
  for (std::size_t pos = 0; pos < n; ++pos) {
    const SubSegment& cur = segments[order[pos]];
    double lo = cur.start;
    double hi = cur.end;
    if (pos > 0) {
      const SubSegment& prev = segments[order[pos - 1]];
      if (cur.start < prev.end) lo = 0.5 * (cur.start + prev.end);
    }
    if (pos + 1 < n) {
      const SubSegment& next = segments[order[pos + 1]];
      if (next.start < cur.end) hi = 0.5 * (next.start + cur.end);
    }
    lo = std::max(lo, prev_hi);
    if (!(hi > lo)) continue;
    prev_hi = hi;

    const std::string label = "spk" + std::to_string(assignment.labels[order[pos]]);
    if (!out.intervals.empty() && out.intervals.back().label == label && lo - out.intervals.back().end <= 1e-6) {
      out.intervals.back().end = hi;
    } else {
      out.intervals.push_back({lo, hi, label});
    }
  }
  return out;
}

DerReport make_report(double ms_s, double fa_s, double se_s, double total_ref_s) {
  if (!(total_ref_s > 0.0)) throw Error(Errc::EmptyReference, "no scored reference speech");
  DerReport r;
  r.ms_s = ms_s;
  r.fa_s = fa_s;
  r.se_s = se_s;
  r.total_ref_s = total_ref_s;
  r.ms_pct = 100.0 * ms_s / total_ref_s;
  r.fa_pct = 100.0 * fa_s / total_ref_s;
  r.se_pct = 100.0 * se_s / total_ref_s;
  r.der_pct = r.ms_pct + r.fa_pct + r.se_pct;
  return r;
}

namespace {

// Times are integer milliseconds while scoring.
using Tick = std::int64_t;
using Span = std::pair<Tick, Tick>;

Tick to_tick(double seconds) { return static_cast<Tick>(std::llround(seconds * 1000.0)); }

std::vector<Span> union_of(std::vector<Span> spans) {
  std::sort(spans.begin(), spans.end());
  std::vector<Span> out;
  for (const auto& s : spans) {
    if (s.second <= s.first) continue;
    if (!out.empty() && s.first <= out.back().second) {
      out.back().second = std::max(out.back().second, s.second);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

std::vector<Span> subtract(const std::vector<Span>& from, const std::vector<Span>& cut) {
  std::vector<Span> out;
  std::size_t c = 0;
  for (auto [lo, hi] : from) {
    while (c < cut.size() && cut[c].second <= lo) ++c;
    std::size_t k = c;
    while (lo < hi && k < cut.size() && cut[k].first < hi) {
      if (cut[k].first > lo) out.emplace_back(lo, cut[k].first);
      lo = std::max(lo, cut[k].second);
      ++k;
    }
    if (lo < hi) out.emplace_back(lo, hi);
  }
  return out;
}

struct Speakers {
  std::vector<std::string> names;
  std::vector<std::vector<Span>> spans;  // union per speaker
};

Speakers group_by_speaker(const Timeline& t) {
  Speakers s;
  s.names = labels_of(t);
  std::sort(s.names.begin(), s.names.end());
  std::vector<std::vector<Span>> raw(s.names.size());
  for (const auto& iv : t.intervals) {
    const auto idx = static_cast<std::size_t>(std::lower_bound(s.names.begin(), s.names.end(), iv.label) - s.names.begin());
    raw[idx].emplace_back(to_tick(iv.start), to_tick(iv.end));
  }
  for (auto& r : raw) s.spans.push_back(union_of(std::move(r)));
  return s;
}

// A maximal stretch of scored time with constant speaker activity.
struct Atom {
  Tick duration = 0;
  std::vector<int> ref;
  std::vector<int> hyp;
};

std::vector<Atom> atomize(const Speakers& ref, const Speakers& hyp, const std::vector<Span>& scored) {
  enum Kind : int { kScored = 0, kRef = 1, kHyp = 2 };
  struct Event {
    Tick t;
    int kind;
    int index;
    int delta;
  };
  std::vector<Event> events;
  for (const auto& [lo, hi] : scored) {
    events.push_back({lo, kScored, 0, +1});
    events.push_back({hi, kScored, 0, -1});
  }
  auto add = [&](const Speakers& s, int kind) {
    for (std::size_t i = 0; i < s.spans.size(); ++i) {
      for (const auto& [lo, hi] : s.spans[i]) {
        events.push_back({lo, kind, static_cast<int>(i), +1});
        events.push_back({hi, kind, static_cast<int>(i), -1});
      }
    }
  };
  add(ref, kRef);
  add(hyp, kHyp);
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });

  std::vector<int> ref_on(ref.names.size(), 0);
  std::vector<int> hyp_on(hyp.names.size(), 0);
  int scored_on = 0;
  std::vector<Atom> atoms;
  for (std::size_t e = 0; e < events.size();) {
    const Tick t = events[e].t;
    for (; e < events.size() && events[e].t == t; ++e) {
      const auto& ev = events[e];
      if (ev.kind == kScored) scored_on += ev.delta;
      else if (ev.kind == kRef) ref_on[static_cast<std::size_t>(ev.index)] += ev.delta;
      else hyp_on[static_cast<std::size_t>(ev.index)] += ev.delta;
    }
    if (e == events.size() || scored_on <= 0) continue;
    const Tick next = events[e].t;
    Atom atom;
    atom.duration = next - t;
    for (std::size_t i = 0; i < ref_on.size(); ++i) {
      if (ref_on[i] > 0) atom.ref.push_back(static_cast<int>(i));
    }
    for (std::size_t i = 0; i < hyp_on.size(); ++i) {
      if (hyp_on[i] > 0) atom.hyp.push_back(static_cast<int>(i));
    }
    if (atom.duration > 0 && (!atom.ref.empty() || !atom.hyp.empty())) atoms.push_back(std::move(atom));
  }
  return atoms;
}

}  // namespace

DerReport compute_der(const Timeline& ref, const Timeline& hyp, const ScoreOptions& opts) {
  if (!(opts.collar_s >= 0.0)) throw Error(Errc::BadParams, "collar must be >= 0");
  const Speakers rs = group_by_speaker(ref);
  const Speakers hs = group_by_speaker(hyp);

  std::vector<Span> scored;
  if (opts.uem) {
    for (const auto& iv : opts.uem->intervals) scored.emplace_back(to_tick(iv.start), to_tick(iv.end));
    scored = union_of(std::move(scored));
  } else {
    Tick lo = std::numeric_limits<Tick>::max();
    Tick hi = std::numeric_limits<Tick>::min();
    for (const Speakers* s : {&rs, &hs}) {
      for (const auto& spans : s->spans) {
        for (const auto& [a, b] : spans) {
          lo = std::min(lo, a);
          hi = std::max(hi, b);
        }
      }
    }
    if (lo < hi) scored.emplace_back(lo, hi);
  }
  if (opts.collar_s > 0.0) {
    const Tick collar = to_tick(opts.collar_s);
    std::vector<Span> excluded;
    for (const auto& spans : rs.spans) {
      for (const auto& [a, b] : spans) {
        excluded.emplace_back(a - collar, a + collar);
        excluded.emplace_back(b - collar, b + collar);
      }
    }
    scored = subtract(scored, union_of(std::move(excluded)));
  }

  const auto atoms = atomize(rs, hs, scored);

  Matrix overlap(rs.names.size(), hs.names.size());
  for (const auto& atom : atoms) {
    for (int r : atom.ref) {
      for (int h : atom.hyp) overlap(static_cast<std::size_t>(r), static_cast<std::size_t>(h)) += static_cast<double>(atom.duration);
    }
  }
  const auto pairs = optimal_speaker_mapping(overlap);
  std::vector<int> hyp_to_ref(hs.names.size(), -1);
  std::vector<std::pair<std::string, std::string>> mapping;
  for (const auto& [r, h] : pairs) {
    if (overlap(static_cast<std::size_t>(r), static_cast<std::size_t>(h)) <= 0.0) continue;
    hyp_to_ref[static_cast<std::size_t>(h)] = r;
    mapping.emplace_back(hs.names[static_cast<std::size_t>(h)], rs.names[static_cast<std::size_t>(r)]);
  }

  Tick ms = 0, fa = 0, se = 0, total = 0;
  for (const auto& atom : atoms) {
    const auto r = static_cast<Tick>(atom.ref.size());
    const auto h = static_cast<Tick>(atom.hyp.size());
    Tick matched = 0;
    for (int hi : atom.hyp) {
      const int mapped = hyp_to_ref[static_cast<std::size_t>(hi)];
      if (mapped >= 0 && std::binary_search(atom.ref.begin(), atom.ref.end(), mapped)) ++matched;
    }
    total += atom.duration * r;
    ms += atom.duration * std::max<Tick>(0, r - h);
    fa += atom.duration * std::max<Tick>(0, h - r);
    se += atom.duration * (std::min(r, h) - matched);
  }

  DerReport report = make_report(ms / 1000.0, fa / 1000.0, se / 1000.0, total / 1000.0);
  std::sort(mapping.begin(), mapping.end());
  report.mapping = std::move(mapping);
  return report;
}

VadScore vad_score(const Timeline& ref, const Timeline& hyp, const ScoreOptions& opts) {
  const DerReport r = compute_der(merge_to_speech(ref, "speech"), merge_to_speech(hyp, "speech"), opts);
  return {r.ms_pct, r.fa_pct, r.ms_s, r.fa_s, r.total_ref_s};
}

ScoreTable score_files(const RttmByFile& ref, const RttmByFile& hyp, const std::map<std::string, Timeline>* uem,
                       double collar_s) {
  std::vector<std::string> extra;
  for (const auto& [file, records] : hyp) {
    if (!ref.contains(file)) extra.push_back(file);
  }
  if (!extra.empty()) {
    std::string names;
    for (const auto& f : extra) names += (names.empty() ? "" : ", ") + f;
    throw Error(Errc::FileSetMismatch, "hypothesis files missing from the reference: " + names);
  }

  ScoreTable table;
  double ms = 0.0, fa = 0.0, se = 0.0, total = 0.0;
  for (const auto& [file, records] : ref) {
    FileScore fs;
    fs.file_id = file;
    const Timeline ref_t = records_to_timeline(records, file);
    Timeline hyp_t{file, {}};
    if (auto it = hyp.find(file); it != hyp.end()) {
      hyp_t = records_to_timeline(it->second, file);
    } else {
      fs.missing_hypothesis = true;
      table.warnings.push_back("no hypothesis for " + file + "; scored as fully missed");
    }
    ScoreOptions opts;
    opts.collar_s = collar_s;
    if (uem) {
      if (auto it = uem->find(file); it != uem->end()) {
        opts.uem = &it->second;
      } else {
        table.warnings.push_back("no UEM entry for " + file + "; scoring its full extent");
      }
    }
    fs.report = compute_der(ref_t, hyp_t, opts);
    ms += fs.report.ms_s;
    fa += fs.report.fa_s;
    se += fs.report.se_s;
    total += fs.report.total_ref_s;
    table.files.push_back(std::move(fs));
  }
  table.overall = make_report(ms, fa, se, total);
  return table;
}

TableRow to_row(const std::string& name, const DerReport& report) {
  return {name, report.ms_pct, report.fa_pct, report.se_pct, report.der_pct};
}

std::string format_error_table(const std::string& key, std::span<const TableRow> rows) {
  std::size_t width = key.size();
  for (const auto& r : rows) width = std::max(width, r.name.size());
  std::string out = fmt::format("{:<{}}  {:>6}  {:>6}  {:>6}  {:>6}\n", key, width, "MS", "FA", "SE", "DER");
  for (const auto& r : rows) {
    out += fmt::format("{:<{}}  {:>6.1f}  {:>6.1f}  {:>6.1f}  {:>6.1f}\n", r.name, width, r.ms_pct, r.fa_pct,
                       r.se_pct, r.der_pct);
  }
  return out;
}

std::string format_key_values(std::span<const TableRow> rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.name + ".ms=" + text::shortest(r.ms_pct) + "\n";
    out += r.name + ".fa=" + text::shortest(r.fa_pct) + "\n";
    out += r.name + ".se=" + text::shortest(r.se_pct) + "\n";
    out += r.name + ".der=" + text::shortest(r.der_pct) + "\n";
  }
  return out;
}

std::string format_score_table(const ScoreTable& table) {
  std::vector<TableRow> rows;
  for (const auto& f : table.files) rows.push_back(to_row(f.file_id, f.report));
  rows.push_back(to_row("OVERALL", table.overall));
  return format_error_table("File", rows);
}

}  // namespace diarkit
