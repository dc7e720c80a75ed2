#include "lyra/loss.hpp"

#include <cmath>

#include "lyra/logmath.hpp"

namespace lyra {

namespace {

void check_plan_classes(const Posteriorgram& p, const PhonemePlan& plan) {
  for (const auto& st : plan.states)
    if (st.class_index < 0 || static_cast<std::size_t>(st.class_index) >= p.classes)
      throw ShapeMismatch("plan class " + std::to_string(st.class_index) +
                          " outside posteriorgram with " + std::to_string(p.classes) +
                          " classes");
}

}  // namespace

CtcResult ctc_loss(const Posteriorgram& p, const PhonemePlan& plan, CtcOptions opts) {
  check_plan_classes(p, plan);
  const std::size_t T = p.frames;
  const std::size_t S = plan.states.size();
  if (S == 0) throw ShapeMismatch("empty plan");

  CtcResult res;
  res.frames = T;
  res.classes = p.classes;
  res.grad.assign(T * p.classes, 0.0);

  if (T < plan.min_frames()) {
    if (opts.infeasible_as_inf) {
      res.loss = std::numeric_limits<double>::infinity();
      return res;
    }
    throw InfeasibleLength("plan needs at least " + std::to_string(plan.min_frames()) +
                           " frames, got " + std::to_string(T));
  }

  const auto cls = [&](std::size_t s) {
    return static_cast<std::size_t>(plan.states[s].class_index);
  };
  const auto logp = [&](std::size_t t, std::size_t s) { return p.at(t, cls(s)); };

  std::vector<double> alpha(T * S, kNegInf), beta(T * S, kNegInf);

  alpha[0 * S + 0] = logp(0, 0);
  if (S >= 2) alpha[0 * S + 1] = logp(0, 1);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      double acc = alpha[(t - 1) * S + s];
      if (s >= 1) acc = logsumexp2(acc, alpha[(t - 1) * S + s - 1]);
      if (plan_skip_allowed(plan, s)) acc = logsumexp2(acc, alpha[(t - 1) * S + s - 2]);
      alpha[t * S + s] = acc == kNegInf ? kNegInf : acc + logp(t, s);
    }
  }

  double log_total = alpha[(T - 1) * S + S - 1];
  if (S >= 2) log_total = logsumexp2(log_total, alpha[(T - 1) * S + S - 2]);
  if (log_total == kNegInf) {
    // No legal path fits; only reachable when feasibility was bypassed.
    res.loss = std::numeric_limits<double>::infinity();
    return res;
  }
  res.loss = -log_total;

  beta[(T - 1) * S + S - 1] = logp(T - 1, S - 1);
  if (S >= 2) beta[(T - 1) * S + S - 2] = logp(T - 1, S - 2);
  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double acc = beta[(t + 1) * S + s];
      if (s + 1 < S) acc = logsumexp2(acc, beta[(t + 1) * S + s + 1]);
      if (s + 2 < S && plan_skip_allowed(plan, s + 2))
        acc = logsumexp2(acc, beta[(t + 1) * S + s + 2]);
      beta[t * S + s] = acc == kNegInf ? kNegInf : acc + logp(t, s);
    }
  }

  // d loss / d x[t][c] = -exp(lse_{s: class(s)=c}(alpha+beta) - x - logP);
  // alpha and beta both include frame t's emission, hence the -x.
  std::vector<double> acc(p.classes);
  for (std::size_t t = 0; t < T; ++t) {
    std::fill(acc.begin(), acc.end(), kNegInf);
    for (std::size_t s = 0; s < S; ++s) {
      const double ab = alpha[t * S + s] == kNegInf || beta[t * S + s] == kNegInf
                            ? kNegInf
                            : alpha[t * S + s] + beta[t * S + s];
      if (ab != kNegInf) acc[cls(s)] = logsumexp2(acc[cls(s)], ab);
    }
    for (std::size_t c = 0; c < p.classes; ++c) {
      if (acc[c] == kNegInf) continue;
      res.grad[t * p.classes + c] = -std::exp(acc[c] - p.at(t, c) - log_total);
    }
  }
  return res;
}

double pitch_ce(const Posteriorgram& p, std::span<const int> targets,
                std::span<const std::uint8_t> mask) {
  if (targets.size() != p.frames)
    throw LengthMismatch("targets cover " + std::to_string(targets.size()) +
                         " frames, posteriorgram has " + std::to_string(p.frames));
  if (!mask.empty() && mask.size() != p.frames)
    throw LengthMismatch("mask length does not match frame count");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < p.frames; ++t) {
    if (!mask.empty() && !mask[t]) continue;
    const int target = targets[t];
    if (target < 0 || static_cast<std::size_t>(target) >= p.classes)
      throw ShapeMismatch("target class " + std::to_string(target) + " out of range");
    sum += -p.at(t, static_cast<std::size_t>(target));
    ++n;
  }
  if (n == 0) throw AllMasked("no frame contributes to the cross entropy");
  return sum / static_cast<double>(n);
}

LossReport total_loss(double phone_loss, double pitch_loss, double lambda) {
  LossReport r;
  r.phone_loss = phone_loss;
  r.pitch_loss = pitch_loss;
  r.lambda = lambda;
  r.total = phone_loss + lambda * pitch_loss;
  return r;
}

BoundaryCurve boundary_targets(std::span<const double> event_times,
                               const FrameClock& clock, std::size_t frames,
                               double width) {
  BoundaryCurve curve;
  curve.clock = clock;
  curve.values.assign(frames, 0.0);
  const double period = clock.frame_period();
  const double half = width / 2.0;
  const double sigma = width / 6.0;  // the window spans +/- 3 sigma
  const auto reach = static_cast<long long>(std::ceil(half / period)) + 1;
  for (double e : event_times) {
    const long long center = std::llround(e / period);
    if (center < 0 || center >= static_cast<long long>(frames)) continue;
    const long long lo = std::max(0LL, center - reach);
    const long long hi = std::min(static_cast<long long>(frames) - 1, center + reach);
    for (long long f = lo; f <= hi; ++f) {
      const double d = static_cast<double>(f - center) * period;
      if (!(std::abs(d) < half)) continue;
      const double v = std::exp(-(d * d) / (2.0 * sigma * sigma));
      curve.values[static_cast<std::size_t>(f)] =
          std::max(curve.values[static_cast<std::size_t>(f)], v);
    }
  }
  return curve;
}

double boundary_bce(const BoundaryCurve& pred, const BoundaryCurve& target) {
  if (pred.frames() != target.frames())
    throw LengthMismatch("curves differ in length: " + std::to_string(pred.frames()) +
                         " vs " + std::to_string(target.frames()));
  if (pred.frames() == 0) throw EmptyInput("empty curves");
  constexpr double kEps = 1e-7;
  double sum = 0.0;
  for (std::size_t t = 0; t < pred.frames(); ++t) {
    const double x = std::clamp(pred.values[t], kEps, 1.0 - kEps);
    const double y = target.values[t];
    sum += -(y * std::log(x) + (1.0 - y) * std::log(1.0 - x));
  }
  return sum / static_cast<double>(pred.frames());
}

}  // namespace lyra
