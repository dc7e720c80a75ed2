#include "lyra/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lyra/logmath.hpp"

namespace lyra {

namespace {

constexpr std::size_t kMaxBruteFrames = 8;
constexpr std::size_t kMaxBruteStates = 9;

void guard_size(const Posteriorgram& p, const PhonemePlan& plan) {
  if (p.frames > kMaxBruteFrames || plan.states.size() > kMaxBruteStates)
    throw TooLarge("brute force is guarded to " + std::to_string(kMaxBruteFrames) +
                   " frames and " + std::to_string(kMaxBruteStates) + " states");
}

// Successor rule written out independently of the production DP: stay, step
// to the next state, or hop over a blank onto a different class.
std::vector<std::size_t> successors(const PhonemePlan& plan, std::size_t s) {
  std::vector<std::size_t> out = {s};
  const std::size_t S = plan.states.size();
  if (s + 1 < S) out.push_back(s + 1);
  if (s + 2 < S && plan.states[s + 1].kind == StateKind::blank &&
      plan.states[s + 2].class_index != plan.states[s].class_index)
    out.push_back(s + 2);
  return out;
}

bool is_end_state(const PhonemePlan& plan, std::size_t s) {
  const std::size_t S = plan.states.size();
  return s + 1 == S || (S >= 2 && s + 2 == S);
}

template <typename Visit>
void enumerate_paths(const Posteriorgram& p, const PhonemePlan& plan, Visit&& visit) {
  const std::size_t T = p.frames;
  std::vector<int> path(T);
  auto extend = [&](auto&& self, std::size_t t, std::size_t s) -> void {
    path[t] = static_cast<int>(s);
    if (t + 1 == T) {
      if (is_end_state(plan, s)) visit(path);
      return;
    }
    for (std::size_t nxt : successors(plan, s)) self(self, t + 1, nxt);
  };
  extend(extend, 0, 0);
  if (plan.states.size() >= 2) extend(extend, 0, 1);
}

double path_score(const Posteriorgram& p, const PhonemePlan& plan,
                  const std::vector<int>& path, const Posteriorgram* bdr,
                  const BdrConfig* cfg) {
  double score = 0.0;
  for (std::size_t t = 0; t < path.size(); ++t)
    score += p.at(t, static_cast<std::size_t>(plan.states[static_cast<std::size_t>(path[t])].class_index));
  if (bdr == nullptr) return score;
  if (cfg->mode == BdrMode::occupancy) {
    for (std::size_t t = 0; t < path.size(); ++t)
      if (plan.states[static_cast<std::size_t>(path[t])].is_line_start)
        score += cfg->alpha * bdr->at(t, 0);
  } else {
    for (std::size_t t = 0; t < path.size(); ++t) {
      if (!plan.states[static_cast<std::size_t>(path[t])].is_line_start) continue;
      if (t > 0 && path[t - 1] == path[t]) continue;  // not the entry frame
      score += cfg->alpha * bdr->at(t, 0);
    }
  }
  return score;
}

BruteForceResult brute_force_impl(const Posteriorgram& p, const PhonemePlan& plan,
                                  const Posteriorgram* bdr, const BdrConfig* cfg) {
  guard_size(p, plan);
  BruteForceResult res;
  res.best_score = kNegInf;
  std::vector<std::pair<std::vector<int>, double>> scored;
  enumerate_paths(p, plan, [&](const std::vector<int>& path) {
    const double s = path_score(p, plan, path, bdr, cfg);
    scored.emplace_back(path, s);
    res.best_score = std::max(res.best_score, s);
  });
  res.path_count = scored.size();
  const double cutoff = res.best_score - 1e-9 * std::max(1.0, std::abs(res.best_score));
  for (auto& [path, s] : scored)
    if (s >= cutoff) res.argmax_paths.push_back(std::move(path));
  return res;
}

}  // namespace

bool BruteForceResult::contains(const std::vector<int>& path) const {
  return std::find(argmax_paths.begin(), argmax_paths.end(), path) != argmax_paths.end();
}

BruteForceResult brute_force_align(const Posteriorgram& p, const PhonemePlan& plan) {
  return brute_force_impl(p, plan, nullptr, nullptr);
}

BruteForceResult brute_force_align(const Posteriorgram& p, const PhonemePlan& plan,
                                   const Posteriorgram& bdr, const BdrConfig& cfg) {
  if (bdr.frames != p.frames) throw LengthMismatch("boundary gram frame count differs");
  return brute_force_impl(p, plan, &bdr, &cfg);
}

double brute_force_ctc(const Posteriorgram& p, const PhonemePlan& plan) {
  guard_size(p, plan);
  double total = 0.0;
  enumerate_paths(p, plan, [&](const std::vector<int>& path) {
    double prob = 1.0;
    for (std::size_t t = 0; t < path.size(); ++t)
      prob *= std::exp(p.at(t, static_cast<std::size_t>(
                                   plan.states[static_cast<std::size_t>(path[t])].class_index)));
    total += prob;
  });
  if (total <= 0.0) throw InfeasibleLength("no legal path fits the posteriorgram");
  return -std::log(total);
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  // rejection sampling keeps this unbiased and portable
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

double uniform_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double normal(std::mt19937_64& rng) {
  // Box-Muller; one draw per call keeps the stream position predictable.
  double u1 = uniform_real(rng);
  while (u1 <= 0.0) u1 = uniform_real(rng);
  const double u2 = uniform_real(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

LyricsDoc random_doc(std::mt19937_64& rng, const PhonemeSet& set, int lines,
                     int max_words, int max_phones) {
  LyricsDoc doc;
  int word_idx = 0;
  for (int li = 0; li < lines; ++li) {
    const int n_words = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(max_words)));
    std::vector<Word> line;
    for (int wi = 0; wi < n_words; ++wi) {
      Word w;
      w.text = "W" + std::to_string(word_idx);
      w.line_idx = li;
      w.word_idx = word_idx++;
      const int n_ph = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(max_phones)));
      for (int k = 0; k < n_ph; ++k) {
        // dictionary range only: skip blank (0) and the trailing space class
        const int ph = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(set.size() - 2)));
        w.phonemes.push_back(ph);
      }
      line.push_back(std::move(w));
    }
    doc.lines.push_back(std::move(line));
  }
  return doc;
}

PhonemePlan plan_from_classes(const std::vector<int>& tokens, int n_phone,
                              const std::vector<std::size_t>& line_start_tokens) {
  PhonemePlan plan;
  plan.n_phone = n_phone;
  plan.states.push_back({0, StateKind::blank, -1, false});
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const bool line_start = std::find(line_start_tokens.begin(), line_start_tokens.end(),
                                      i) != line_start_tokens.end();
    plan.states.push_back({tokens[i], StateKind::phoneme, static_cast<int>(i), line_start});
    plan.states.push_back({0, StateKind::blank, -1, false});
  }
  return plan;
}

Posteriorgram random_posteriorgram(std::mt19937_64& rng, std::size_t frames,
                                   std::size_t classes, double scale, GramKind kind) {
  Posteriorgram p;
  p.frames = frames;
  p.classes = classes;
  p.kind = kind;
  p.data.resize(frames * classes);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t c = 0; c < classes; ++c) p.at(t, c) = scale * normal(rng);
    const double lse = logsumexp(std::span<const double>(p.data.data() + t * classes, classes));
    for (std::size_t c = 0; c < classes; ++c) p.at(t, c) -= lse;
  }
  return p;
}

Posteriorgram random_boundary_gram(std::mt19937_64& rng, std::size_t frames) {
  Posteriorgram p;
  p.frames = frames;
  p.classes = 1;
  p.kind = GramKind::boundary;
  p.data.resize(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    double u = uniform_real(rng);
    if (u <= 0.0) u = 0.5;
    p.data[t] = std::log(u);
  }
  return p;
}

namespace {

// Uniform legal-path sampling: backward completion counts (row-normalized to
// dodge overflow), then a forward categorical walk.
std::vector<int> sample_path(std::mt19937_64& rng, const PhonemePlan& plan,
                             std::size_t frames) {
  const std::size_t S = plan.states.size();
  std::vector<double> ways(frames * S, 0.0);
  for (std::size_t s = 0; s < S; ++s)
    if (is_end_state(plan, s)) ways[(frames - 1) * S + s] = 1.0;
  for (std::size_t t = frames - 1; t-- > 0;) {
    double row_max = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      double acc = 0.0;
      for (std::size_t nxt : successors(plan, s)) acc += ways[(t + 1) * S + nxt];
      ways[t * S + s] = acc;
      row_max = std::max(row_max, acc);
    }
    if (row_max > 0.0)
      for (std::size_t s = 0; s < S; ++s) ways[t * S + s] /= row_max;
  }

  const double w0 = ways[0] ;
  const double w1 = S >= 2 ? ways[1] : 0.0;
  if (w0 + w1 <= 0.0) throw InfeasibleSpec("no legal path for this plan length");
  std::vector<int> path(frames);
  std::size_t s = uniform_real(rng) * (w0 + w1) < w0 ? 0 : 1;
  path[0] = static_cast<int>(s);
  for (std::size_t t = 1; t < frames; ++t) {
    // only successors that still admit a completion
    std::vector<std::size_t> nexts;
    double total = 0.0;
    for (std::size_t nxt : successors(plan, s)) {
      if (ways[t * S + nxt] <= 0.0) continue;
      nexts.push_back(nxt);
      total += ways[t * S + nxt];
    }
    double draw = uniform_real(rng) * total;
    std::size_t chosen = nexts.back();
    for (std::size_t nxt : nexts) {
      draw -= ways[t * S + nxt];
      if (draw <= 0.0) {
        chosen = nxt;
        break;
      }
    }
    s = chosen;
    path[t] = static_cast<int>(s);
  }
  return path;
}

}  // namespace

SynthCase synth_case(const SynthSpec& spec) {
  const PhonemePlan& plan = spec.plan;
  if (plan.states.empty()) throw InfeasibleSpec("empty plan");
  if (spec.frames < plan.min_frames())
    throw InfeasibleSpec("frames " + std::to_string(spec.frames) +
                         " below the plan minimum " + std::to_string(plan.min_frames()));
  if (spec.noise < 0.0) throw InfeasibleSpec("noise must be nonnegative");
  const int n_phone = plan.n_phone;
  const int n_pitch = spec.layout.n_classes;
  if (n_phone < 2 || n_pitch < 2) throw InfeasibleSpec("need at least two classes per axis");

  std::mt19937_64 rng(spec.seed);
  SynthCase out;

  out.true_path.states = sample_path(rng, plan, spec.frames);

  // word ranges and line onsets straight from the sampled path
  struct Range {
    std::size_t first = 0, last = 0;
    bool seen = false;
    int line = -1;
  };
  std::vector<int> state_line(plan.states.size(), -1);
  {
    int line = -1;
    for (std::size_t s = 0; s < plan.states.size(); ++s) {
      if (plan.states[s].is_line_start) ++line;
      state_line[s] = line;
    }
  }
  int max_word = -1;
  for (const auto& st : plan.states) max_word = std::max(max_word, st.word_idx);
  std::vector<Range> word_range(static_cast<std::size_t>(max_word + 1));
  for (std::size_t t = 0; t < spec.frames; ++t) {
    const auto s = static_cast<std::size_t>(out.true_path.states[t]);
    const PlanState& st = plan.states[s];
    if (st.kind != StateKind::phoneme || st.word_idx < 0) continue;
    Range& r = word_range[static_cast<std::size_t>(st.word_idx)];
    if (!r.seen) {
      r.first = t;
      r.seen = true;
      r.line = state_line[s];
    }
    r.last = t;
  }
  for (std::size_t w = 0; w < word_range.size(); ++w) {
    const Range& r = word_range[w];
    if (!r.seen) continue;
    WordSpan span;
    span.word_idx = static_cast<int>(w);
    span.line_idx = r.line;
    span.onset = spec.clock.frame_time(r.first);
    span.offset = spec.clock.frame_time(r.last + 1);
    out.true_word_spans.push_back(span);
  }
  for (const WordSpan& w : out.true_word_spans) {
    if (out.true_line_spans.empty() || out.true_line_spans.back().line_idx != w.line_idx)
      out.true_line_spans.push_back({w.line_idx, w.onset, w.offset});
    else
      out.true_line_spans.back().offset = w.offset;
  }
  for (const LineSpan& l : out.true_line_spans) out.line_onsets.push_back(l.onset);

  out.boundary = boundary_targets(out.line_onsets, spec.clock, spec.frames);

  // Note track: changes only where the path enters a phoneme state, held
  // through blanks inside the word, silent outside word spans. Segments
  // shorter than the decoder's 50 ms default would not survive a round
  // trip, so boundaries that close are dropped.
  const double period = spec.clock.frame_period();
  const auto min_note_frames =
      static_cast<std::size_t>(std::ceil(0.06 / period)) + 1;
  std::vector<int> pitch_cls(spec.frames, PitchLayout::kSilenceClass);
  const int n_voiced = n_pitch - 1;
  for (const Range& r : word_range) {
    if (!r.seen) continue;
    std::vector<std::size_t> entries;
    for (std::size_t t = r.first; t <= r.last; ++t) {
      const auto s = static_cast<std::size_t>(out.true_path.states[t]);
      if (plan.states[s].kind != StateKind::phoneme) continue;
      if (t == r.first || out.true_path.states[t - 1] != out.true_path.states[t])
        entries.push_back(t);
    }
    std::vector<std::size_t> bounds = {r.first};
    for (std::size_t e : entries) {
      if (e - bounds.back() < min_note_frames) continue;
      if (r.last + 1 - e < min_note_frames) continue;
      if (uniform_real(rng) < 0.5) bounds.push_back(e);
    }
    bounds.push_back(r.last + 1);
    if (r.last + 1 - r.first < min_note_frames) continue;  // word too short to sing
    int prev = -1;
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
      int cls;
      do {
        cls = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n_voiced)));
      } while (cls == prev);
      prev = cls;
      for (std::size_t t = bounds[b]; t < bounds[b + 1]; ++t) pitch_cls[t] = cls;
    }
  }

  // independent run-length scan for the truth list
  for (std::size_t t = 0; t < spec.frames;) {
    std::size_t u = t;
    while (u < spec.frames && pitch_cls[u] == pitch_cls[t]) ++u;
    if (pitch_cls[t] != PitchLayout::kSilenceClass) {
      NoteEvent n;
      n.onset = spec.clock.frame_time(t);
      n.offset = spec.clock.frame_time(u);
      n.midi = spec.layout.class_to_midi(pitch_cls[t]);
      out.true_notes.push_back(n);
    }
    t = u;
  }

  JointTensor& joint = out.joint;
  joint.frames = spec.frames;
  joint.n_phone = static_cast<std::size_t>(n_phone);
  joint.n_pitch = static_cast<std::size_t>(n_pitch);
  joint.clock = spec.clock;
  joint.data.assign(spec.frames * joint.n_phone * joint.n_pitch, 0.0);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    const auto s = static_cast<std::size_t>(out.true_path.states[t]);
    const auto true_phone = static_cast<std::size_t>(plan.states[s].class_index);
    const auto true_pitch = static_cast<std::size_t>(pitch_cls[t]);
    for (std::size_t p = 0; p < joint.n_phone; ++p)
      for (std::size_t k = 0; k < joint.n_pitch; ++k) {
        double v = 0.0;
        if (p == true_phone) v += spec.margin;
        if (k == true_pitch) v += spec.margin;
        if (spec.noise > 0.0) v += spec.noise * normal(rng);
        joint.at(t, p, k) = v;
      }
  }

  if (spec.blur > 0) {
    const auto w = static_cast<std::size_t>(spec.blur);
    std::vector<double> smeared(joint.data.size());
    const std::size_t plane = joint.n_phone * joint.n_pitch;
    for (std::size_t t = 0; t < spec.frames; ++t) {
      const std::size_t lo = t >= w ? t - w : 0;
      const std::size_t hi = std::min(spec.frames - 1, t + w);
      for (std::size_t i = 0; i < plane; ++i) {
        double acc = 0.0;
        for (std::size_t u = lo; u <= hi; ++u) acc += joint.data[u * plane + i];
        smeared[t * plane + i] = acc / static_cast<double>(hi - lo + 1);
      }
    }
    joint.data = std::move(smeared);
  }

  out.true_path.score = 0.0;  // filled by the caller when needed
  return out;
}

}  // namespace lyra
