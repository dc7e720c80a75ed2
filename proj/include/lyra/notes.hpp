#pragma once

#include <vector>

#include "lyra/gram.hpp"

namespace lyra {

struct NoteEvent {
  double onset = 0.0;
  double offset = 0.0;
  int midi = 0;
};

struct NoteDecodeOptions {
  double min_dur = 0.05;   // events shorter than this are dropped
  double merge_gap = 0.0;  // join same-pitch events separated by less (0 = off)
};

// Per-frame argmax, runs of one non-silence class become events, short
// events are discarded. Uses the posteriorgram's own clock.
std::vector<NoteEvent> decode_notes(const Posteriorgram& pitch,
                                    const PitchLayout& layout,
                                    NoteDecodeOptions opts = {});

}  // namespace lyra
