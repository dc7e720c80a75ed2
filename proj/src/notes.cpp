#include "lyra/notes.hpp"

namespace lyra {

std::vector<NoteEvent> decode_notes(const Posteriorgram& pitch,
                                    const PitchLayout& layout,
                                    NoteDecodeOptions opts) {
  if (pitch.classes != static_cast<std::size_t>(layout.n_classes))
    throw ShapeMismatch("pitch gram has " + std::to_string(pitch.classes) +
                        " classes, layout expects " + std::to_string(layout.n_classes));

  // per-frame argmax, ties to the smaller class
  std::vector<int> cls(pitch.frames);
  for (std::size_t t = 0; t < pitch.frames; ++t) {
    int best = 0;
    for (std::size_t c = 1; c < pitch.classes; ++c)
      if (pitch.at(t, c) > pitch.at(t, static_cast<std::size_t>(best)))
        best = static_cast<int>(c);
    cls[t] = best;
  }

  struct Run {
    std::size_t first, last;
    int cls;
  };
  std::vector<Run> runs;
  for (std::size_t t = 0; t < cls.size();) {
    std::size_t u = t;
    while (u < cls.size() && cls[u] == cls[t]) ++u;
    if (cls[t] != PitchLayout::kSilenceClass) runs.push_back({t, u - 1, cls[t]});
    t = u;
  }

  const FrameClock& clock = pitch.clock;
  std::vector<NoteEvent> notes;
  for (const Run& r : runs) {
    NoteEvent n;
    n.onset = clock.frame_time(r.first);
    n.offset = clock.frame_time(r.last + 1);
    n.midi = layout.class_to_midi(r.cls);
    if (opts.merge_gap > 0.0 && !notes.empty() && notes.back().midi == n.midi &&
        n.onset - notes.back().offset < opts.merge_gap) {
      notes.back().offset = n.offset;
      continue;
    }
    notes.push_back(n);
  }

  std::vector<NoteEvent> kept;
  for (const NoteEvent& n : notes)
    if (n.offset - n.onset >= opts.min_dur) kept.push_back(n);
  return kept;
}

}  // namespace lyra
