#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "lyra/loss.hpp"
#include "lyra/notes.hpp"

namespace lyra {

enum class EvalLevel : std::uint8_t { word, line };

const char* eval_level_name(EvalLevel level);
EvalLevel eval_level_from_name(const std::string& name);

struct AlignEval {
  double aae = 0.0;  // mean |est - ref| in seconds
  double pco = 0.0;  // fraction of onsets within tolerance
  EvalLevel level = EvalLevel::word;
};

// Onsets paired by index; est and ref must have equal nonzero length.
AlignEval eval_alignment(std::span<const double> est, std::span<const double> ref,
                         double tol = 0.3, EvalLevel level = EvalLevel::word);

struct BoundaryPRF {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  std::size_t hits = 0;
  bool degenerate = false;  // est or ref was empty; zeros by convention
};

// One-to-one greedy matching in time order; a pair is a hit iff the events
// are within `window` seconds of each other.
BoundaryPRF eval_boundary(std::span<const double> est, std::span<const double> ref,
                          double window = 0.5);

// AUC-ROC of the predicted curve against the target curve binarized at
// `binarize_at`, via the rank statistic with ties counting 1/2. Throws
// DegenerateLabels when the binarized target is single-class.
double eval_auc(const BoundaryCurve& pred, const BoundaryCurve& target,
                double binarize_at = 0.5);

struct NoteEval {
  double con = 0.0;      // onset only
  double conp = 0.0;     // onset + pitch
  double conpoff = 0.0;  // onset + pitch + offset
};

struct NoteMatchConfig {
  double onset_tol = 0.05;        // seconds
  double offset_ratio = 0.2;      // of reference note duration
  double offset_min = 0.05;       // seconds; tol = max(offset_min, ratio*dur)
  double pitch_tol_cents = 50.0;
  bool octave_wrap = true;
};

// F-scores over one-to-one matchings of the candidate pairs satisfying each
// criterion set. Matching is maximum bipartite so tightening the criteria
// can only lower the score (conpoff <= conp <= con).
NoteEval eval_notes(std::span<const NoteEvent> est, std::span<const NoteEvent> ref,
                    NoteMatchConfig cfg = {});

}  // namespace lyra
