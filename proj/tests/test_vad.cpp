#include <doctest.h>

#include <algorithm>

#include "diarkit/error.hpp"
#include "diarkit/rng.hpp"
#include "diarkit/synth.hpp"
#include "diarkit/vad.hpp"

using namespace diarkit;

namespace {

VadConfig plain(double threshold) {
  VadConfig c;
  c.threshold = threshold;
  c.hangover_frames = 0;
  c.min_speech_s = 0.0;
  c.merge_gap_s = 0.0;
  return c;
}

double speech_seconds(const Timeline& t) {
  double s = 0;
  for (const auto& iv : t.intervals) s += iv.duration();
  return s;
}

}  // namespace

TEST_CASE("silence has zero probability everywhere") {
  AudioBuffer z{std::vector<double>(16000, 0.0), 16000, "z"};
  for (double p : energy_vad_frames(z, VadConfig{})) CHECK(p == 0.0);
}

TEST_CASE("constant amplitude gives equal probabilities") {
  AudioBuffer c{std::vector<double>(16000, 0.25), 16000, "c"};
  const auto probs = energy_vad_frames(c, VadConfig{});
  CHECK(std::adjacent_find(probs.begin(), probs.end(), std::not_equal_to<>()) == probs.end());
}

TEST_CASE("noise burst outranks the surrounding silence") {
  SplitMix64 rng(3);
  AudioBuffer b{std::vector<double>(32000, 0.0), 16000, "burst"};
  for (std::size_t i = 12000; i < 20000; ++i) b.samples[i] = std::clamp(rng.normal(), -1.0, 1.0);
  const auto probs = energy_vad_frames(b, VadConfig{});  // 20 ms frames of 320 samples
  double silent_max = 0.0, burst_min = 1.0;
  for (std::size_t f = 0; f < probs.size(); ++f) {
    const std::size_t a = f * 320, e = a + 320;
    if (e <= 12000 || a >= 20000) silent_max = std::max(silent_max, probs[f]);
    if (a >= 12000 && e <= 20000) burst_min = std::min(burst_min, probs[f]);
  }
  CHECK(burst_min > silent_max);
}

TEST_CASE("regions from frame probabilities") {
  SUBCASE("nothing above threshold") {
    const std::vector<double> probs(50, 0.1);
    CHECK(frames_to_regions(probs, plain(0.5), "f").empty());
  }
  SUBCASE("a one second run at 0.5 s") {
    std::vector<double> probs(100, 0.0);
    std::fill(probs.begin() + 25, probs.begin() + 75, 1.0);
    const Timeline t = frames_to_regions(probs, plain(0.5), "f");
    REQUIRE(t.intervals.size() == 1);
    CHECK(t.intervals[0].start == doctest::Approx(0.5).epsilon(0.02));
    CHECK(t.intervals[0].end == doctest::Approx(1.5).epsilon(0.02));
  }
  SUBCASE("a 0.1 s gap closes under merge_gap 0.3") {
    std::vector<double> probs(100, 0.0);
    std::fill(probs.begin() + 10, probs.begin() + 40, 1.0);
    std::fill(probs.begin() + 45, probs.begin() + 80, 1.0);
    VadConfig c = plain(0.5);
    c.merge_gap_s = 0.3;
    const Timeline t = frames_to_regions(probs, c, "f");
    REQUIRE(t.intervals.size() == 1);
    CHECK(t.intervals[0].start == doctest::Approx(0.2));
    CHECK(t.intervals[0].end == doctest::Approx(1.6));
  }
  SUBCASE("hangover extends the end only") {
    std::vector<double> probs(100, 0.0);
    std::fill(probs.begin() + 10, probs.begin() + 20, 1.0);
    VadConfig c = plain(0.5);
    c.hangover_frames = 5;
    const Timeline t = frames_to_regions(probs, c, "f");
    REQUIRE(t.intervals.size() == 1);
    CHECK(t.intervals[0].start == doctest::Approx(0.2));
    CHECK(t.intervals[0].end == doctest::Approx(0.5));
  }
  SUBCASE("short bursts are dropped") {
    std::vector<double> probs(100, 0.0);
    std::fill(probs.begin() + 10, probs.begin() + 13, 1.0);
    VadConfig c = plain(0.5);
    c.min_speech_s = 0.2;
    CHECK(frames_to_regions(probs, c, "f").empty());
  }
}

TEST_CASE("aggressiveness presets") {
  VadConfig c;
  c.aggressiveness = 0;
  CHECK(apply_aggressiveness(c).threshold.value() == doctest::Approx(0.3));
  c.aggressiveness = 3;
  CHECK(apply_aggressiveness(c).threshold.value() == doctest::Approx(0.75));
  c.aggressiveness = 4;
  try {
    apply_aggressiveness(c);
    FAIL("expected BadLevel");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadLevel);
  }
  c.aggressiveness = 1;
  c.threshold = 0.5;
  CHECK(apply_aggressiveness(c).threshold.value() == 0.5);
  VadConfig none;
  CHECK(none.effective_threshold() == doctest::Approx(kDefaultVadThreshold));
}

TEST_CASE("frame sizes other than 10/20/30 ms are rejected") {
  VadConfig c;
  c.frame_ms = 25;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("external labels") {
  CHECK(parse_external_vad("0.0 1.0\n2.0 3.0\n", "f").intervals.size() == 2);
  const Timeline merged = parse_external_vad("0.0 2.0\n1.0 3.0\n", "f");
  REQUIRE(merged.intervals.size() == 1);
  CHECK(merged.intervals[0].start == 0.0);
  CHECK(merged.intervals[0].end == 3.0);
  CHECK_THROWS_AS(parse_external_vad("1.0 0.5\n", "f"), ParseError);
  CHECK_THROWS_AS(parse_external_vad("1.0 abc\n", "f"), ParseError);
  CHECK(parse_external_vad("# comment\n\n0.5 1.5 speech\n", "f").intervals.size() == 1);
  const Timeline rttm = parse_external_vad(
      "SPEAKER a 1 0.00 1.00 <NA> <NA> x <NA> <NA>\nSPEAKER b 1 5.00 1.00 <NA> <NA> y <NA> <NA>\n", "a");
  REQUIRE(rttm.intervals.size() == 1);
  CHECK(rttm.intervals[0].end == 1.0);
}

TEST_CASE("speech shrinks monotonically with threshold and level") {
  SynthConfig sc;
  sc.duration_s = 30.0;
  sc.seed = 21;
  const AudioBuffer audio = synthesize_conversation(sc).audio;

  double previous = 1e9;
  for (double thr = 0.05; thr <= 0.95; thr += 0.05) {
    VadConfig c;
    c.threshold = thr;
    const Timeline t = run_energy_vad(audio, c);
    const double s = speech_seconds(t);
    CHECK(s <= previous + 1e-12);
    previous = s;
    for (std::size_t i = 0; i < t.intervals.size(); ++i) {
      CHECK(t.intervals[i].end <= audio.duration() + 1e-9);
      if (i) CHECK(t.intervals[i].start >= t.intervals[i - 1].end);
    }
  }
  previous = 1e9;
  for (int level = 0; level <= 3; ++level) {
    VadConfig c;
    c.aggressiveness = level;
    const double s = speech_seconds(run_energy_vad(audio, c));
    CHECK(s <= previous + 1e-12);
    previous = s;
  }
}
