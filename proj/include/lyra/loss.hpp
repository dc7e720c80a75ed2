#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lyra/gram.hpp"
#include "lyra/lexicon.hpp"

namespace lyra {

struct LossReport {
  double phone_loss = 0.0;
  double pitch_loss = 0.0;
  double lambda = 0.5;
  double total = 0.0;
};

struct CtcOptions {
  // Return +inf loss instead of throwing InfeasibleLength when the
  // posteriorgram is too short for the plan.
  bool infeasible_as_inf = false;
};

struct CtcResult {
  double loss = 0.0;                // nats
  std::vector<double> grad;         // d loss / d log-prob, row-major [t][c]
  std::size_t frames = 0;
  std::size_t classes = 0;
};

// Forward-backward sum over all legal paths, in log space. The gradient is
// taken with respect to the stored log-probabilities, so trainers can
// chain-rule through whatever produced them.
CtcResult ctc_loss(const Posteriorgram& p, const PhonemePlan& plan,
                   CtcOptions opts = {});

// Mean frame-level cross entropy over the unmasked frames. An empty mask
// means every frame counts; throws AllMasked when nothing contributes.
double pitch_ce(const Posteriorgram& p, std::span<const int> targets,
                std::span<const std::uint8_t> mask = {});

// total = phone + lambda * pitch.
LossReport total_loss(double phone_loss, double pitch_loss, double lambda);

// Per-frame activation target in [0, 1], peaking at 1.0 on event frames.
struct BoundaryCurve {
  std::vector<double> values;
  FrameClock clock;

  std::size_t frames() const { return values.size(); }
};

// One truncated Gaussian window of total length `width` per event, peak 1.0
// at the event's nearest frame; overlapping windows combine by elementwise
// max. Events whose nearest frame falls outside [0, frames) are ignored.
BoundaryCurve boundary_targets(std::span<const double> event_times,
                               const FrameClock& clock, std::size_t frames,
                               double width = 0.7);

// Mean binary cross entropy; predictions are clamped to [eps, 1-eps] with
// eps = 1e-7.
double boundary_bce(const BoundaryCurve& pred, const BoundaryCurve& target);

}  // namespace lyra
