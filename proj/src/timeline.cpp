#include "diarkit/timeline.hpp"

#include <algorithm>
#include <tuple>

namespace diarkit {

double Timeline::total_duration() const noexcept {
  double total = 0.0;
  for (const auto& iv : intervals) total += iv.duration();
  return total;
}

double Timeline::extent_end() const noexcept {
  double end = 0.0;
  for (const auto& iv : intervals) end = std::max(end, iv.end);
  return end;
}

void sort_intervals(Timeline& timeline) {
  std::sort(timeline.intervals.begin(), timeline.intervals.end(),
            [](const Interval& a, const Interval& b) {
              return std::tie(a.start, a.end, a.label) < std::tie(b.start, b.end, b.label);
            });
}

Timeline merge_to_speech(const Timeline& timeline, const std::string& label) {
  Timeline sorted = timeline;
  sort_intervals(sorted);
  Timeline out{timeline.file_id, {}};
  for (const auto& iv : sorted.intervals) {
    if (iv.end <= iv.start) continue;
    if (!out.intervals.empty() && iv.start <= out.intervals.back().end) {
      out.intervals.back().end = std::max(out.intervals.back().end, iv.end);
    } else {
      out.intervals.push_back({iv.start, iv.end, label});
    }
  }
  return out;
}

std::vector<std::string> labels_of(const Timeline& timeline) {
  Timeline sorted = timeline;
  sort_intervals(sorted);
  std::vector<std::string> labels;
  for (const auto& iv : sorted.intervals) {
    if (std::find(labels.begin(), labels.end(), iv.label) == labels.end()) {
      labels.push_back(iv.label);
    }
  }
  return labels;
}

}  // namespace diarkit
