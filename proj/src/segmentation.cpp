#include "diarkit/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "diarkit/error.hpp"

namespace diarkit {
namespace {

constexpr double kEps = 1e-9;

}  // namespace

void WindowConfig::validate() const {
  if (!(window_s > 0.0)) throw Error(Errc::BadParams, "window must be positive");
  if (!(stride_s > 0.0) || stride_s > window_s) throw Error(Errc::BadParams, "need 0 < stride <= window");
  if (!(min_subsegment_s >= 0.0)) throw Error(Errc::BadParams, "min_subsegment must be >= 0");
}

std::vector<SubSegment> slide_windows(const Timeline& speech, const WindowConfig& cfg) {
  cfg.validate();
  std::vector<SubSegment> out;
  for (std::size_t r = 0; r < speech.intervals.size(); ++r) {
    const double a = speech.intervals[r].start;
    const double b = speech.intervals[r].end;
    if (b - a < cfg.min_subsegment_s - kEps || !(b > a)) continue;

    double covered = a;
    for (std::size_t k = 0;; ++k) {
      const double start = a + static_cast<double>(k) * cfg.stride_s;
      const double end = start + cfg.window_s;
      if (end > b + kEps) break;
      out.push_back({start, std::min(end, b), r});
      covered = std::min(end, b);
    }
    if (b - covered > kEps) out.push_back({std::max(a, b - cfg.window_s), b, r});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SubSegment& x, const SubSegment& y) { return x.start < y.start; });
  return out;
}

}  // namespace diarkit
