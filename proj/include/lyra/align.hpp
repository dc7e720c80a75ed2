#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lyra/gram.hpp"
#include "lyra/lexicon.hpp"

namespace lyra {

// One plan state per frame; states[t] is the plan state aligned to frame t.
// Transitions obey CTC topology (stay, advance by one, or skip a blank
// between different classes); the path starts in state 0 or 1 and ends in
// the last or second-to-last state.
struct AlignmentPath {
  std::vector<int> states;
  double score = 0.0;  // accumulated log-probability plus any bonus
};

struct WordSpan {
  int word_idx = 0;
  int line_idx = 0;
  double onset = 0.0;
  double offset = 0.0;
};

struct LineSpan {
  int line_idx = 0;
  double onset = 0.0;
  double offset = 0.0;
};

struct Spans {
  std::vector<WordSpan> words;
  std::vector<LineSpan> lines;
};

enum class BdrMode : std::uint8_t {
  // Bonus granted once, at the frame where the path enters a line-start
  // state.
  entry,
  // Bonus granted at every frame aligned to a line-start state.
  occupancy,
};

const char* bdr_mode_name(BdrMode mode);
BdrMode bdr_mode_from_name(const std::string& name);

struct BdrConfig {
  double alpha = 0.8;
  BdrMode mode = BdrMode::entry;
};

// Highest-scoring legal path through the plan. Ties prefer staying in the
// current state, then the smaller advance.
AlignmentPath viterbi(const Posteriorgram& p, const PhonemePlan& plan);

// Same search with alpha-weighted boundary log-probability added at
// line-start states, per BdrConfig::mode.
AlignmentPath viterbi_bdr(const Posteriorgram& p, const Posteriorgram& bdr,
                          const PhonemePlan& plan, const BdrConfig& cfg);

// Word onset = time of the first frame on the word's first phoneme state;
// word offset = time just after the last frame on its last phoneme state.
// Line spans run from their first word's onset to their last word's offset.
Spans path_to_spans(const AlignmentPath& path, const PhonemePlan& plan,
                    const FrameClock& clock);

}  // namespace lyra
