#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lyra/align.hpp"
#include "lyra/synth.hpp"
#include "testutil.hpp"

using namespace lyra;

namespace {

// independent rescoring of a path, including the boundary term
double rescore(const Posteriorgram& p, const PhonemePlan& plan,
               const std::vector<int>& states, const Posteriorgram* bdr = nullptr,
               const BdrConfig* cfg = nullptr) {
  double score = 0.0;
  for (std::size_t t = 0; t < states.size(); ++t)
    score += p.at(t, static_cast<std::size_t>(
                        plan.states[static_cast<std::size_t>(states[t])].class_index));
  if (bdr && cfg) {
    for (std::size_t t = 0; t < states.size(); ++t) {
      const auto& st = plan.states[static_cast<std::size_t>(states[t])];
      if (!st.is_line_start) continue;
      if (cfg->mode == BdrMode::entry && t > 0 && states[t - 1] == states[t]) continue;
      score += cfg->alpha * bdr->at(t, 0);
    }
  }
  return score;
}

}  // namespace

TEST_CASE("a dominant class pins every frame to its state") {
  PhonemePlan plan = plan_from_classes({1}, 3);
  Posteriorgram p = testutil::uniform_posteriorgram(3, 3);
  for (std::size_t t = 0; t < 3; ++t) {
    p.at(t, 1) = std::log(0.9);
    p.at(t, 0) = std::log(0.05);
    p.at(t, 2) = std::log(0.05);
  }
  const AlignmentPath path = viterbi(p, plan);
  CHECK(path.states == std::vector<int>{1, 1, 1});
  CHECK(path.score == doctest::Approx(3.0 * std::log(0.9)).epsilon(1e-12));
}

TEST_CASE("viterbi matches the exhaustive-search oracle") {
  std::mt19937_64 rng(21);
  for (int it = 0; it < 200; ++it) {
    const auto inst = testutil::random_small_instance(rng, 6, 3, 4);
    const AlignmentPath got = viterbi(inst.gram, inst.plan);
    const BruteForceResult want = brute_force_align(inst.gram, inst.plan);
    CHECK(std::abs(got.score - want.best_score) <=
          1e-9 * std::max(1.0, std::abs(want.best_score)));
    CHECK(want.contains(got.states));
  }
}

TEST_CASE("under a uniform gram every legal path ties") {
  const PhonemePlan plan = plan_from_classes({1, 2}, 4);
  const Posteriorgram p = testutil::uniform_posteriorgram(5, 4);
  const AlignmentPath path = viterbi(p, plan);
  CHECK(path.score == doctest::Approx(5.0 * std::log(0.25)).epsilon(1e-12));
  CHECK(testutil::is_legal_path(plan, path.states, 5));
}

TEST_CASE("zero bonus weight reduces to plain viterbi, path included") {
  std::mt19937_64 rng(22);
  for (int it = 0; it < 100; ++it) {
    const auto inst = testutil::random_small_instance(rng, 6, 3, 4, 2);
    const Posteriorgram bdr = random_boundary_gram(rng, inst.gram.frames);
    for (BdrMode mode : {BdrMode::entry, BdrMode::occupancy}) {
      const AlignmentPath plain = viterbi(inst.gram, inst.plan);
      const AlignmentPath with = viterbi_bdr(inst.gram, bdr, inst.plan, {0.0, mode});
      CHECK(with.score == plain.score);
      CHECK(with.states == plain.states);
    }
  }
}

TEST_CASE("an entry-mode bonus pulls the second line onto the boundary peak") {
  // two lines, one phoneme each: states [eps a eps b eps]
  const PhonemePlan plan = plan_from_classes({1, 2}, 3, {0, 1});
  const std::size_t T = 6;
  const Posteriorgram p = testutil::uniform_posteriorgram(T, 3);
  Posteriorgram bdr;
  bdr.frames = T;
  bdr.classes = 1;
  bdr.kind = GramKind::boundary;
  bdr.data.assign(T, std::log(0.01));
  bdr.data[0] = std::log(0.9);  // line 1's natural entry
  bdr.data[4] = std::log(1.0);  // the peak for line 2
  const BdrConfig cfg{0.8, BdrMode::entry};

  const AlignmentPath path = viterbi_bdr(p, bdr, plan, cfg);
  const BruteForceResult oracle = brute_force_align(p, plan, bdr, cfg);

  CHECK(std::abs(path.score - oracle.best_score) <= 1e-9);
  CHECK(oracle.contains(path.states));
  // line 2's phoneme is state 3; its entry frame must be the peak
  std::size_t entry = T;
  for (std::size_t t = 0; t < T; ++t)
    if (path.states[t] == 3) {
      entry = t;
      break;
    }
  CHECK(entry == 4);
}

TEST_CASE("both bonus modes match the exhaustive oracle") {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 150; ++it) {
    const auto inst = testutil::random_small_instance(rng, 6, 3, 4, 2);
    const Posteriorgram bdr = random_boundary_gram(rng, inst.gram.frames);
    for (BdrMode mode : {BdrMode::entry, BdrMode::occupancy}) {
      for (double alpha : {0.0, 0.8}) {
        const BdrConfig cfg{alpha, mode};
        const AlignmentPath got = viterbi_bdr(inst.gram, bdr, inst.plan, cfg);
        const BruteForceResult want = brute_force_align(inst.gram, inst.plan, bdr, cfg);
        CHECK(std::abs(got.score - want.best_score) <=
              1e-9 * std::max(1.0, std::abs(want.best_score)));
        CHECK(want.contains(got.states));
      }
    }
  }
}

TEST_CASE("the returned score decomposes into emission and bonus terms") {
  std::mt19937_64 rng(24);
  for (int it = 0; it < 100; ++it) {
    const auto inst = testutil::random_small_instance(rng, 6, 3, 4, 2);
    const Posteriorgram bdr = random_boundary_gram(rng, inst.gram.frames);
    for (BdrMode mode : {BdrMode::entry, BdrMode::occupancy}) {
      const BdrConfig cfg{0.8, mode};
      const AlignmentPath got = viterbi_bdr(inst.gram, bdr, inst.plan, cfg);
      const double recomputed = rescore(inst.gram, inst.plan, got.states, &bdr, &cfg);
      CHECK(std::abs(got.score - recomputed) <= 1e-9);
    }
  }
}

TEST_CASE("no random legal path outscores viterbi") {
  std::mt19937_64 rng(25);
  for (int it = 0; it < 100; ++it) {
    const auto inst = testutil::random_small_instance(rng, 6, 3, 4);
    const AlignmentPath best = viterbi(inst.gram, inst.plan);
    for (int k = 0; k < 10; ++k) {
      const auto path = testutil::random_legal_path(rng, inst.plan, inst.gram.frames);
      if (path.empty()) continue;
      CHECK(rescore(inst.gram, inst.plan, path) <= best.score + 1e-12);
    }
  }
}

TEST_CASE("adding a per-frame constant shifts the score and keeps the path") {
  std::mt19937_64 rng(26);
  for (int it = 0; it < 50; ++it) {
    const auto inst = testutil::random_small_instance(rng, 6, 3, 4);
    const double c = 4.0 * (uniform_real(rng) - 0.5);
    Posteriorgram shifted = inst.gram;
    for (auto& v : shifted.data) v += c;
    const AlignmentPath a = viterbi(inst.gram, inst.plan);
    const AlignmentPath b = viterbi(shifted, inst.plan);
    CHECK(b.states == a.states);
    CHECK(std::abs(b.score - (a.score + c * static_cast<double>(inst.gram.frames))) <= 1e-9);
  }
}

TEST_CASE("word onsets never decrease along the path") {
  std::mt19937_64 rng(27);
  const FrameClock clock;
  for (int it = 0; it < 50; ++it) {
    const auto inst = testutil::random_small_instance(rng, 8, 3, 4);
    AlignmentPath path;
    path.states = testutil::random_legal_path(rng, inst.plan, inst.gram.frames);
    if (path.states.empty()) continue;
    const Spans spans = path_to_spans(path, inst.plan, clock);
    for (std::size_t i = 1; i < spans.words.size(); ++i) {
      CHECK(spans.words[i].word_idx > spans.words[i - 1].word_idx);
      CHECK(spans.words[i].onset >= spans.words[i - 1].offset);  // no overlap
    }
    for (const auto& w : spans.words) CHECK(w.onset < w.offset);
  }
}

TEST_CASE("span times follow the frame clock") {
  // single word on states [eps a eps], occupying frames 2..5 of 8
  const PhonemePlan plan = plan_from_classes({1}, 3);
  AlignmentPath path;
  path.states = {0, 0, 1, 1, 1, 1, 2, 2};
  const FrameClock clock;  // 256 / 22050
  const Spans spans = path_to_spans(path, plan, clock);
  REQUIRE(spans.words.size() == 1);
  CHECK(spans.words[0].onset == doctest::Approx(0.02322).epsilon(1e-4));
  CHECK(spans.words[0].offset == doctest::Approx(0.06966).epsilon(1e-4));
  CHECK(spans.words[0].onset == 2.0 * clock.frame_period());
  CHECK(spans.words[0].offset == 6.0 * clock.frame_period());
}

TEST_CASE("each word appears exactly once, lines do not overlap") {
  const PhonemePlan plan = plan_from_classes({1, 2, 3}, 5, {0, 2});
  const Posteriorgram p = testutil::uniform_posteriorgram(8, 5);
  const AlignmentPath path = viterbi(p, plan);
  const Spans spans = path_to_spans(path, plan, FrameClock{});
  REQUIRE(spans.words.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(spans.words[i].word_idx == static_cast<int>(i));
  REQUIRE(spans.lines.size() == 2);
  CHECK(spans.lines[0].line_idx == 0);
  CHECK(spans.lines[1].line_idx == 1);
  CHECK(spans.lines[0].offset <= spans.lines[1].onset);
}

TEST_CASE("infeasible and mismatched inputs are rejected") {
  const PhonemePlan plan = plan_from_classes({1, 1}, 3);  // min 3 frames
  const Posteriorgram p = testutil::uniform_posteriorgram(2, 3);
  CHECK_THROWS_AS(viterbi(p, plan), InfeasibleLength);

  const Posteriorgram ok = testutil::uniform_posteriorgram(5, 3);
  Posteriorgram bdr;
  bdr.frames = 4;  // wrong length
  bdr.classes = 1;
  bdr.kind = GramKind::boundary;
  bdr.data.assign(4, std::log(0.5));
  CHECK_THROWS_AS(viterbi_bdr(ok, bdr, plan, {}), LengthMismatch);
}
