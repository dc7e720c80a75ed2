#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "lyra/align.hpp"
#include "lyra/gram.hpp"
#include "lyra/lexicon.hpp"
#include "lyra/loss.hpp"
#include "lyra/notes.hpp"

namespace lyra {

struct SynthSpec {
  std::uint64_t seed = 0;
  std::size_t frames = 0;
  PhonemePlan plan;
  double noise = 0.0;   // logit noise scale, additive Gaussian
  int blur = 0;         // temporal box-smear half-width, frames
  FrameClock clock;
  PitchLayout layout = PitchLayout::d2_b5();
  double margin = 4.0;  // logit gap between the true class and the rest
};

struct SynthCase {
  AlignmentPath true_path;
  JointTensor joint;
  BoundaryCurve boundary;          // from the true line onsets
  std::vector<NoteEvent> true_notes;
  std::vector<WordSpan> true_word_spans;
  std::vector<LineSpan> true_line_spans;
  std::vector<double> line_onsets;  // boundary event times
};

// Samples a legal path uniformly, then builds a joint tensor whose pooled
// phoneme argmax follows the path's classes and whose pooled pitch argmax
// follows a note track that changes only at phoneme entry frames. With
// noise 0 the pipeline recovers every truth field exactly.
SynthCase synth_case(const SynthSpec& spec);

struct BruteForceResult {
  double best_score = 0.0;
  // Every legal path within 1e-9 of the maximum (absorbs summation-order
  // rounding between the DP and this enumeration).
  std::vector<std::vector<int>> argmax_paths;
  std::size_t path_count = 0;  // all legal paths enumerated

  bool contains(const std::vector<int>& path) const;
};

// Exhaustive enumeration of every legal path, scored like viterbi /
// viterbi_bdr. Deliberately shares no code with the DP. Instances are
// guarded to frames <= 8 and states <= 9; larger ones throw TooLarge.
BruteForceResult brute_force_align(const Posteriorgram& p, const PhonemePlan& plan);
BruteForceResult brute_force_align(const Posteriorgram& p, const PhonemePlan& plan,
                                   const Posteriorgram& bdr, const BdrConfig& cfg);

// Exhaustive path sum in plain (non-log) arithmetic; returns the negative
// log of the total. Same size guard as brute_force_align.
double brute_force_ctc(const Posteriorgram& p, const PhonemePlan& plan);

// Deterministic helpers used by the generators and tests. mt19937_64 output
// is pinned by the standard, and these avoid the library-defined
// distributions so fixtures are bit-identical everywhere.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n);
double uniform_real(std::mt19937_64& rng);  // [0, 1)
double normal(std::mt19937_64& rng);

// Random lyrics-like document: `lines` lines, 1..max_words words each,
// 1..max_phones phonemes per word, drawn from the set's dictionary range.
LyricsDoc random_doc(std::mt19937_64& rng, const PhonemeSet& set, int lines,
                     int max_words = 3, int max_phones = 3);

// Small synthetic plan straight from class indices (tests and fixtures);
// token class 0 is never used since 0 is the conventional blank.
PhonemePlan plan_from_classes(const std::vector<int>& tokens, int n_phone,
                              const std::vector<std::size_t>& line_start_tokens = {0});

// Random normalized posteriorgram (log_softmax of N(0, scale) logits).
Posteriorgram random_posteriorgram(std::mt19937_64& rng, std::size_t frames,
                                   std::size_t classes, double scale = 2.0,
                                   GramKind kind = GramKind::phoneme);

// Random boundary log-probability track (classes == 1, values log U(0,1]).
Posteriorgram random_boundary_gram(std::mt19937_64& rng, std::size_t frames);

}  // namespace lyra
