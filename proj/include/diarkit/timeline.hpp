#pragma once

#include <string>
#include <vector>

namespace diarkit {

struct Interval {
  double start = 0.0;
  double end = 0.0;
  std::string label;  // empty for unlabeled speech regions

  double duration() const noexcept { return end - start; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Ordered labeled intervals for one recording. Used for VAD regions,
/// reference/hypothesis speaker turns and UEM scoring regions.
struct Timeline {
  std::string file_id;
  std::vector<Interval> intervals;

  bool empty() const noexcept { return intervals.empty(); }
  double total_duration() const noexcept;
  /// Latest end time, 0 for an empty timeline.
  double extent_end() const noexcept;

  friend bool operator==(const Timeline&, const Timeline&) = default;
};

/// Sorts by (start, end, label).
void sort_intervals(Timeline& timeline);

/// Union of all intervals regardless of label; result is sorted,
/// non-overlapping, and every interval carries `label`.
Timeline merge_to_speech(const Timeline& timeline, const std::string& label = "");

/// Distinct labels in first-appearance order after sorting.
std::vector<std::string> labels_of(const Timeline& timeline);

}  // namespace diarkit
