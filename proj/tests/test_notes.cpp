#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lyra/notes.hpp"
#include "lyra/synth.hpp"
#include "testutil.hpp"

using namespace lyra;

namespace {

Posteriorgram gram_from_classes(const std::vector<int>& cls, int n_classes) {
  Posteriorgram p;
  p.frames = cls.size();
  p.classes = static_cast<std::size_t>(n_classes);
  p.kind = GramKind::pitch;
  p.data.assign(p.frames * p.classes, std::log(0.01));
  for (std::size_t t = 0; t < p.frames; ++t)
    p.at(t, static_cast<std::size_t>(cls[t])) = std::log(0.9);
  return p;
}

// test-local run-length reference: argmax, runs, min-dur filter
std::vector<NoteEvent> rle_reference(const Posteriorgram& p, const PitchLayout& layout,
                                     double min_dur) {
  std::vector<int> arg(p.frames);
  for (std::size_t t = 0; t < p.frames; ++t) {
    int best = 0;
    for (std::size_t c = 1; c < p.classes; ++c)
      if (p.at(t, c) > p.at(t, static_cast<std::size_t>(best))) best = static_cast<int>(c);
    arg[t] = best;
  }
  std::vector<NoteEvent> out;
  const double period = p.clock.frame_period();
  std::size_t t = 0;
  while (t < arg.size()) {
    std::size_t u = t;
    while (u < arg.size() && arg[u] == arg[t]) ++u;
    if (arg[t] != 0) {
      const double dur = static_cast<double>(u - t) * period;
      if (dur >= min_dur)
        out.push_back({static_cast<double>(t) * period, static_cast<double>(u) * period,
                       layout.midi_lo + arg[t] - 1});
    }
    t = u;
  }
  return out;
}

bool same_notes(const std::vector<NoteEvent>& a, const std::vector<NoteEvent>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].onset != b[i].onset || a[i].offset != b[i].offset || a[i].midi != b[i].midi)
      return false;
  return true;
}

}  // namespace

TEST_CASE("silence everywhere decodes to nothing") {
  const PitchLayout layout{5, 38};
  const Posteriorgram p = gram_from_classes(std::vector<int>(10, 0), 5);
  CHECK(decode_notes(p, layout).empty());
}

TEST_CASE("a single run becomes one event with frame-accurate times") {
  const PitchLayout layout = PitchLayout::d2_b5();
  std::vector<int> cls = {0, 23, 23, 23, 0};  // class 23 = MIDI 60
  const Posteriorgram p = gram_from_classes(cls, 47);
  NoteDecodeOptions opts;
  opts.min_dur = 0.0;
  const auto notes = decode_notes(p, layout, opts);
  REQUIRE(notes.size() == 1);
  CHECK(notes[0].midi == 60);
  CHECK(notes[0].onset == p.clock.frame_time(1));
  CHECK(notes[0].offset == p.clock.frame_time(4));
}

TEST_CASE("decoding matches the run-length reference on random grams") {
  std::mt19937_64 rng(31);
  const PitchLayout layout{8, 38};
  for (int it = 0; it < 60; ++it) {
    const std::size_t frames = 1 + uniform_index(rng, 60);
    // biased toward silence so runs break up
    std::vector<int> cls(frames);
    for (auto& c : cls)
      c = uniform_index(rng, 3) == 0 ? 0 : static_cast<int>(1 + uniform_index(rng, 7));
    const Posteriorgram p = gram_from_classes(cls, 8);
    const auto got = decode_notes(p, layout);
    const auto want = rle_reference(p, layout, 0.05);
    CHECK(same_notes(got, want));
  }
}

TEST_CASE("events shorter than min_dur are dropped") {
  const PitchLayout layout{5, 38};
  // run of 3 frames ~ 34.8 ms < 50 ms, run of 6 frames ~ 69.7 ms
  std::vector<int> cls = {0, 1, 1, 1, 0, 2, 2, 2, 2, 2, 2, 0};
  const Posteriorgram p = gram_from_classes(cls, 5);
  const auto notes = decode_notes(p, layout);
  REQUIRE(notes.size() == 1);
  CHECK(notes[0].midi == layout.class_to_midi(2));
  for (const auto& n : decode_notes(p, layout)) CHECK(n.offset - n.onset >= 0.05);
}

TEST_CASE("the merge-gap option joins same-pitch neighbors") {
  const PitchLayout layout{5, 38};
  std::vector<int> cls = {1, 1, 1, 1, 1, 0, 1, 1, 1, 1, 1};
  const Posteriorgram p = gram_from_classes(cls, 5);
  NoteDecodeOptions opts;
  CHECK(decode_notes(p, layout, opts).size() == 2);
  opts.merge_gap = 0.05;  // the 1-frame hole is ~11.6 ms
  const auto merged = decode_notes(p, layout, opts);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].onset == p.clock.frame_time(0));
  CHECK(merged[0].offset == p.clock.frame_time(11));
}

TEST_CASE("argmax decoding ignores monotone score transformations") {
  std::mt19937_64 rng(32);
  const PitchLayout layout{6, 38};
  for (int it = 0; it < 30; ++it) {
    const Posteriorgram p = random_posteriorgram(rng, 30, 6, 2.0, GramKind::pitch);
    Posteriorgram q = p;
    for (auto& v : q.data) v = 2.5 * v + 1.0;  // strictly increasing map
    CHECK(same_notes(decode_notes(p, layout), decode_notes(q, layout)));
  }
}

TEST_CASE("events are disjoint and ordered") {
  std::mt19937_64 rng(33);
  const PitchLayout layout{6, 38};
  for (int it = 0; it < 30; ++it) {
    const Posteriorgram p = random_posteriorgram(rng, 50, 6, 2.0, GramKind::pitch);
    const auto notes = decode_notes(p, layout);
    for (std::size_t i = 1; i < notes.size(); ++i)
      CHECK(notes[i].onset >= notes[i - 1].offset);
  }
}

TEST_CASE("class-count mismatches are rejected") {
  const Posteriorgram p = testutil::uniform_posteriorgram(4, 5, GramKind::pitch);
  CHECK_THROWS_AS(decode_notes(p, PitchLayout::d2_b5()), ShapeMismatch);
}
