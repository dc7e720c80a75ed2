#include "lyra/align.hpp"

#include <cmath>
#include <unordered_map>

#include "lyra/logmath.hpp"

namespace lyra {

namespace {

void check_inputs(const Posteriorgram& p, const PhonemePlan& plan) {
  if (plan.states.empty()) throw ShapeMismatch("empty plan");
  for (const auto& st : plan.states)
    if (st.class_index < 0 || static_cast<std::size_t>(st.class_index) >= p.classes)
      throw ShapeMismatch("plan class " + std::to_string(st.class_index) +
                          " outside posteriorgram with " + std::to_string(p.classes) +
                          " classes");
  if (p.frames < plan.min_frames())
    throw InfeasibleLength("plan needs at least " + std::to_string(plan.min_frames()) +
                           " frames, got " + std::to_string(p.frames));
}

AlignmentPath backtrack(const std::vector<double>& alpha,
                        const std::vector<std::int8_t>& back, std::size_t T,
                        std::size_t S) {
  // Ties at the end prefer the smaller state index.
  std::size_t s = S - 1;
  if (S >= 2 && alpha[(T - 1) * S + S - 2] >= alpha[(T - 1) * S + S - 1]) s = S - 2;
  AlignmentPath path;
  path.score = alpha[(T - 1) * S + s];
  path.states.assign(T, 0);
  for (std::size_t t = T; t-- > 0;) {
    path.states[t] = static_cast<int>(s);
    s -= static_cast<std::size_t>(back[t * S + s]);
  }
  return path;
}

}  // namespace

const char* bdr_mode_name(BdrMode mode) {
  return mode == BdrMode::entry ? "entry" : "occupancy";
}

BdrMode bdr_mode_from_name(const std::string& name) {
  if (name == "entry") return BdrMode::entry;
  if (name == "occupancy") return BdrMode::occupancy;
  throw ConfigError("unknown boundary mode '" + name + "' (want entry or occupancy)");
}

AlignmentPath viterbi(const Posteriorgram& p, const PhonemePlan& plan) {
  check_inputs(p, plan);
  const std::size_t T = p.frames;
  const std::size_t S = plan.states.size();
  const auto logp = [&](std::size_t t, std::size_t s) {
    return p.at(t, static_cast<std::size_t>(plan.states[s].class_index));
  };

  std::vector<double> alpha(T * S, kNegInf);
  std::vector<std::int8_t> back(T * S, 0);

  alpha[0] = logp(0, 0);
  if (S >= 2) alpha[1] = logp(0, 1);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      // Strict comparisons make ties prefer staying, then the smaller hop.
      double best = alpha[(t - 1) * S + s];
      std::int8_t step = 0;
      if (s >= 1 && alpha[(t - 1) * S + s - 1] > best) {
        best = alpha[(t - 1) * S + s - 1];
        step = 1;
      }
      if (plan_skip_allowed(plan, s) && alpha[(t - 1) * S + s - 2] > best) {
        best = alpha[(t - 1) * S + s - 2];
        step = 2;
      }
      if (best == kNegInf) continue;
      alpha[t * S + s] = best + logp(t, s);
      back[t * S + s] = step;
    }
  }
  return backtrack(alpha, back, T, S);
}

AlignmentPath viterbi_bdr(const Posteriorgram& p, const Posteriorgram& bdr,
                          const PhonemePlan& plan, const BdrConfig& cfg) {
  check_inputs(p, plan);
  if (bdr.frames != p.frames)
    throw LengthMismatch("boundary gram covers " + std::to_string(bdr.frames) +
                         " frames, phoneme gram " + std::to_string(p.frames));
  if (bdr.classes != 1)
    throw ShapeMismatch("boundary gram must have exactly one class");
  if (cfg.alpha < 0.0) throw ConfigError("alpha must be nonnegative");

  const std::size_t T = p.frames;
  const std::size_t S = plan.states.size();
  const auto logp = [&](std::size_t t, std::size_t s) {
    return p.at(t, static_cast<std::size_t>(plan.states[s].class_index));
  };
  const auto bonus = [&](std::size_t t, std::size_t s) {
    return plan.states[s].is_line_start ? cfg.alpha * bdr.at(t, 0) : 0.0;
  };
  const bool occupancy = cfg.mode == BdrMode::occupancy;

  std::vector<double> alpha(T * S, kNegInf);
  std::vector<std::int8_t> back(T * S, 0);

  // Starting inside a state counts as entering it at frame 0.
  alpha[0] = logp(0, 0) + bonus(0, 0);
  if (S >= 2) alpha[1] = logp(0, 1) + bonus(0, 1);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      const double b = bonus(t, s);
      // Entry mode pays the bonus only on the arriving transition, so it
      // joins the advancing candidates before the comparison; occupancy
      // mode pays it on every frame, so it joins the emission instead.
      double best = alpha[(t - 1) * S + s];
      std::int8_t step = 0;
      if (s >= 1) {
        const double cand = alpha[(t - 1) * S + s - 1] + (occupancy ? 0.0 : b);
        if (cand > best) {
          best = cand;
          step = 1;
        }
      }
      if (plan_skip_allowed(plan, s)) {
        const double cand = alpha[(t - 1) * S + s - 2] + (occupancy ? 0.0 : b);
        if (cand > best) {
          best = cand;
          step = 2;
        }
      }
      if (best == kNegInf) continue;
      alpha[t * S + s] = best + logp(t, s) + (occupancy ? b : 0.0);
      back[t * S + s] = step;
    }
  }
  return backtrack(alpha, back, T, S);
}

Spans path_to_spans(const AlignmentPath& path, const PhonemePlan& plan,
                    const FrameClock& clock) {
  // line index of each state, counting line starts in plan order
  std::vector<int> state_line(plan.states.size(), -1);
  int line = -1;
  for (std::size_t s = 0; s < plan.states.size(); ++s) {
    if (plan.states[s].is_line_start) ++line;
    state_line[s] = line;
  }

  struct Range {
    std::size_t first = 0, last = 0;
    int line = 0;
    bool seen = false;
  };
  std::unordered_map<int, Range> by_word;
  int max_word = -1;
  for (std::size_t t = 0; t < path.states.size(); ++t) {
    const auto s = static_cast<std::size_t>(path.states[t]);
    const PlanState& st = plan.states[s];
    if (st.kind != StateKind::phoneme || st.word_idx < 0) continue;
    Range& r = by_word[st.word_idx];
    if (!r.seen) {
      r.first = t;
      r.seen = true;
      r.line = state_line[s];
    }
    r.last = t;
    max_word = std::max(max_word, st.word_idx);
  }

  Spans spans;
  for (int w = 0; w <= max_word; ++w) {
    auto it = by_word.find(w);
    if (it == by_word.end()) continue;
    const Range& r = it->second;
    WordSpan span;
    span.word_idx = w;
    span.line_idx = r.line;
    span.onset = clock.frame_time(r.first);
    span.offset = clock.frame_time(r.last + 1);
    spans.words.push_back(span);
  }

  for (const WordSpan& w : spans.words) {
    if (spans.lines.empty() || spans.lines.back().line_idx != w.line_idx) {
      spans.lines.push_back({w.line_idx, w.onset, w.offset});
    } else {
      spans.lines.back().offset = w.offset;
    }
  }
  return spans;
}

}  // namespace lyra
