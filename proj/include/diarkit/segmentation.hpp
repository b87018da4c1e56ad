#pragma once

#include <cstddef>
#include <vector>

#include "diarkit/timeline.hpp"

namespace diarkit {

struct SubSegment {
  double start = 0.0;
  double end = 0.0;
  std::size_t region_index = 0;

  double duration() const noexcept { return end - start; }
  friend bool operator==(const SubSegment&, const SubSegment&) = default;
};

struct WindowConfig {
  double window_s = 2.0;
  double stride_s = 0.4;
  double min_subsegment_s = 0.4;

  void validate() const;
  friend bool operator==(const WindowConfig&, const WindowConfig&) = default;
};

/// Cuts every speech region [a, b) into windows [a + k*stride, a + k*stride
/// + window) that fit, then one tail window [max(a, b - window), b) if the
/// region end is not yet covered. Regions shorter than min_subsegment_s are
/// dropped. Output is ordered by start.
std::vector<SubSegment> slide_windows(const Timeline& speech, const WindowConfig& cfg = {});

}  // namespace diarkit
