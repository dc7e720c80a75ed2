#include "lyra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace lyra {

namespace {

double f_score(std::size_t matches, std::size_t n_est, std::size_t n_ref) {
  if (n_est == 0 && n_ref == 0) return 1.0;
  if (n_est == 0 || n_ref == 0) return 0.0;
  return 2.0 * static_cast<double>(matches) / static_cast<double>(n_est + n_ref);
}

// Kuhn's augmenting-path maximum bipartite matching. Sizes here are note
// counts per clip, so the O(V*E) bound is nowhere near a concern.
std::size_t max_matching(std::size_t n_est, const std::vector<std::vector<int>>& adj) {
  std::vector<int> ref_match;
  if (!adj.empty()) {
    int max_ref = -1;
    for (const auto& row : adj)
      for (int j : row) max_ref = std::max(max_ref, j);
    ref_match.assign(static_cast<std::size_t>(max_ref + 1), -1);
  }
  std::vector<char> visited;
  std::function<bool(int)> augment = [&](int i) -> bool {
    for (int j : adj[static_cast<std::size_t>(i)]) {
      if (visited[static_cast<std::size_t>(j)]) continue;
      visited[static_cast<std::size_t>(j)] = 1;
      if (ref_match[static_cast<std::size_t>(j)] < 0 ||
          augment(ref_match[static_cast<std::size_t>(j)])) {
        ref_match[static_cast<std::size_t>(j)] = i;
        return true;
      }
    }
    return false;
  };
  std::size_t matches = 0;
  for (std::size_t i = 0; i < n_est; ++i) {
    visited.assign(ref_match.size(), 0);
    if (augment(static_cast<int>(i))) ++matches;
  }
  return matches;
}

double wrapped_cents(double est_midi, double ref_midi, bool octave_wrap) {
  double cents = 100.0 * (est_midi - ref_midi);
  if (!octave_wrap) return std::abs(cents);
  cents = std::fmod(cents, 1200.0);
  if (cents < 0.0) cents += 1200.0;
  return std::min(cents, 1200.0 - cents);
}

}  // namespace

const char* eval_level_name(EvalLevel level) {
  return level == EvalLevel::word ? "word" : "line";
}

EvalLevel eval_level_from_name(const std::string& name) {
  if (name == "word") return EvalLevel::word;
  if (name == "line") return EvalLevel::line;
  throw ConfigError("unknown eval level '" + name + "' (want word or line)");
}

AlignEval eval_alignment(std::span<const double> est, std::span<const double> ref,
                         double tol, EvalLevel level) {
  if (est.size() != ref.size())
    throw LengthMismatch("estimate has " + std::to_string(est.size()) +
                         " onsets, reference " + std::to_string(ref.size()));
  if (est.empty()) throw EmptyInput("no onsets to evaluate");
  double abs_sum = 0.0;
  std::size_t within = 0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double err = std::abs(est[i] - ref[i]);
    abs_sum += err;
    if (err <= tol) ++within;
  }
  AlignEval out;
  out.aae = abs_sum / static_cast<double>(est.size());
  out.pco = static_cast<double>(within) / static_cast<double>(est.size());
  out.level = level;
  return out;
}

BoundaryPRF eval_boundary(std::span<const double> est, std::span<const double> ref,
                          double window) {
  BoundaryPRF out;
  if (est.empty() || ref.empty()) {
    out.degenerate = true;
    return out;
  }
  std::size_t i = 0, j = 0, hits = 0;
  while (i < est.size() && j < ref.size()) {
    if (std::abs(est[i] - ref[j]) <= window) {
      ++hits;
      ++i;
      ++j;
    } else if (est[i] < ref[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  out.hits = hits;
  out.precision = static_cast<double>(hits) / static_cast<double>(est.size());
  out.recall = static_cast<double>(hits) / static_cast<double>(ref.size());
  out.f_score = (out.precision > 0.0 && out.recall > 0.0)
                    ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                    : 0.0;
  return out;
}

double eval_auc(const BoundaryCurve& pred, const BoundaryCurve& target,
                double binarize_at) {
  if (pred.frames() != target.frames())
    throw LengthMismatch("curves differ in length");
  const std::size_t n = pred.frames();
  if (n == 0) throw EmptyInput("empty curves");

  std::vector<char> positive(n);
  std::size_t n_pos = 0;
  for (std::size_t t = 0; t < n; ++t) {
    positive[t] = target.values[t] >= binarize_at;
    n_pos += positive[t];
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw DegenerateLabels("binarized target is single-class");

  // Mann-Whitney with midranks; equal scores share the average rank.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pred.values[a] < pred.values[b];
  });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && pred.values[order[j]] == pred.values[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t k = i; k < j; ++k)
      if (positive[order[k]]) rank_sum_pos += midrank;
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum_pos - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

NoteEval eval_notes(std::span<const NoteEvent> est, std::span<const NoteEvent> ref,
                    NoteMatchConfig cfg) {
  const auto onset_ok = [&](const NoteEvent& e, const NoteEvent& r) {
    return std::abs(e.onset - r.onset) <= cfg.onset_tol;
  };
  const auto pitch_ok = [&](const NoteEvent& e, const NoteEvent& r) {
    return wrapped_cents(e.midi, r.midi, cfg.octave_wrap) <= cfg.pitch_tol_cents;
  };
  const auto offset_ok = [&](const NoteEvent& e, const NoteEvent& r) {
    const double tol = std::max(cfg.offset_min, cfg.offset_ratio * (r.offset - r.onset));
    return std::abs(e.offset - r.offset) <= tol;
  };

  std::vector<std::vector<int>> adj_on(est.size()), adj_onp(est.size()),
      adj_onpoff(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) {
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (!onset_ok(est[i], ref[j])) continue;
      adj_on[i].push_back(static_cast<int>(j));
      if (!pitch_ok(est[i], ref[j])) continue;
      adj_onp[i].push_back(static_cast<int>(j));
      if (!offset_ok(est[i], ref[j])) continue;
      adj_onpoff[i].push_back(static_cast<int>(j));
    }
  }

  NoteEval out;
  out.con = f_score(max_matching(est.size(), adj_on), est.size(), ref.size());
  out.conp = f_score(max_matching(est.size(), adj_onp), est.size(), ref.size());
  out.conpoff = f_score(max_matching(est.size(), adj_onpoff), est.size(), ref.size());
  return out;
}

}  // namespace lyra
