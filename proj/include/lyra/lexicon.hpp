#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lyra/errors.hpp"

namespace lyra {

// Alignment class set: blank at index 0, the 39 dictionary phonemes at
// 1..39, the inter-word space at index 40.
struct PhonemeSet {
  std::vector<std::string> symbols;
  int blank_index = 0;
  int space_index = 0;

  static PhonemeSet cmu();

  int size() const { return static_cast<int>(symbols.size()); }
  // -1 when the symbol is not in the set.
  int index_of(const std::string& symbol) const;
  const std::string& symbol(int index) const { return symbols[static_cast<std::size_t>(index)]; }
};

struct Word {
  std::string text;
  std::vector<int> phonemes;  // indices into the PhonemeSet, never blank/space
  int line_idx = 0;
  int word_idx = 0;
  bool oov = false;
};

struct LyricsDoc {
  std::vector<std::vector<Word>> lines;
  std::vector<std::string> oov_words;  // filled by phonemize()

  std::size_t word_count() const;
  bool empty() const { return lines.empty(); }
};

// Splits lines on newline and words on whitespace, strips punctuation
// (keeping apostrophes), folds ASCII case to upper, drops lines left empty.
// Throws EmptyLyrics when nothing survives.
LyricsDoc parse_lyrics(const std::string& text);

// CMU-format pronouncing dictionary: one "WORD  PH1 PH2 ..." entry per line,
// ";;;" comment lines ignored, stress digits stripped, "WORD(n)" alternate
// pronunciations skipped (the first listed variant wins).
class PronouncingDict {
public:
  struct Lookup {
    std::vector<int> phonemes;
    bool oov = false;
  };

  static PronouncingDict load(const std::filesystem::path& path, const PhonemeSet& set);
  static PronouncingDict from_stream(std::istream& in, const PhonemeSet& set);

  // Unknown words fall back to a letter-by-letter spelling expansion and are
  // flagged oov.
  Lookup lookup(const std::string& word) const;

  std::size_t size() const { return entries_.size(); }

private:
  std::unordered_map<std::string, std::vector<int>> entries_;
  std::unordered_map<char, std::vector<int>> letter_names_;
};

// Fills every word's phoneme list and collects out-of-vocabulary words.
void phonemize(LyricsDoc& doc, const PronouncingDict& dict);

enum class StateKind : std::uint8_t { blank, phoneme, space };

struct PlanState {
  int class_index = 0;
  StateKind kind = StateKind::blank;
  int word_idx = -1;  // -1 for blanks and spaces
  bool is_line_start = false;
};

// Blank-expanded alignment target: blanks interleaved around every emitted
// token, so states.size() == 2 * K + 1 for K emitted tokens.
struct PhonemePlan {
  std::vector<PlanState> states;
  int n_phone = 0;  // class count of the matrices this plan aligns against

  // Fewest frames any legal path through this plan can take.
  std::size_t min_frames() const;
  std::size_t size() const { return states.size(); }
};

// True when a path may hop from state s-2 directly to state s (the skipped
// state is a blank and the classes on both sides differ).
bool plan_skip_allowed(const PhonemePlan& plan, std::size_t s);

struct BuildPlanOptions {
  bool insert_spaces = true;      // a space token between consecutive words
  bool space_across_lines = true; // also at line breaks (when insert_spaces)
};

PhonemePlan build_plan(const LyricsDoc& doc, const PhonemeSet& set,
                       BuildPlanOptions opts = {});

struct TimedWord {
  double start = 0.0;
  double end = 0.0;
};

struct WindowSample {
  double start = 0.0;
  std::vector<int> covered;  // indices of words fully inside the window
};

// Enumerates sliding windows from 0 by `hop` until the window start passes
// the last word end; a word is covered iff it lies fully inside the window.
std::vector<WindowSample> window_samples(std::span<const TimedWord> words,
                                         double window, double hop);

}  // namespace lyra
