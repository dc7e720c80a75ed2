#include "lyra/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace lyra {

namespace {

constexpr const char* kBlankSymbol = "<eps>";
constexpr const char* kSpaceSymbol = "<sp>";

// The 39 dictionary phonemes, alphabetical.
constexpr const char* kCmuPhonemes[] = {
    "AA", "AE", "AH", "AO", "AW", "AY", "B",  "CH", "D",  "DH",
    "EH", "ER", "EY", "F",  "G",  "HH", "IH", "IY", "JH", "K",
    "L",  "M",  "N",  "NG", "OW", "OY", "P",  "R",  "S",  "SH",
    "T",  "TH", "UH", "UW", "V",  "W",  "Y",  "Z",  "ZH",
};

// Letter and digit names for the out-of-vocabulary spelling fallback.
const std::unordered_map<char, const char*> kSpellings = {
    {'A', "EY"},        {'B', "B IY"},      {'C', "S IY"},   {'D', "D IY"},
    {'E', "IY"},        {'F', "EH F"},      {'G', "JH IY"},  {'H', "EY CH"},
    {'I', "AY"},        {'J', "JH EY"},     {'K', "K EY"},   {'L', "EH L"},
    {'M', "EH M"},      {'N', "EH N"},      {'O', "OW"},     {'P', "P IY"},
    {'Q', "K Y UW"},    {'R', "AA R"},      {'S', "EH S"},   {'T', "T IY"},
    {'U', "Y UW"},      {'V', "V IY"},      {'W', "D AH B AH L Y UW"},
    {'X', "EH K S"},    {'Y', "W AY"},      {'Z', "Z IY"},
    {'0', "Z IH R OW"}, {'1', "W AH N"},    {'2', "T UW"},   {'3', "TH R IY"},
    {'4', "F AO R"},    {'5', "F AY V"},    {'6', "S IH K S"},
    {'7', "S EH V AH N"}, {'8', "EY T"},    {'9', "N AY N"},
};

bool is_word_char(unsigned char c) { return std::isalnum(c) || c == '\''; }

// Keep letters, digits and apostrophes; fold ASCII to upper. Tokens without
// any alphanumeric character vanish.
std::string normalize_token(const std::string& token) {
  std::string out;
  bool has_alnum = false;
  for (unsigned char c : token) {
    if (c >= 0x80) continue;  // non-ASCII treated as punctuation
    if (!is_word_char(c)) continue;
    if (std::isalnum(c)) has_alnum = true;
    out.push_back(static_cast<char>(std::toupper(c)));
  }
  return has_alnum ? out : std::string();
}

std::string strip_stress(const std::string& ph) {
  std::string out = ph;
  while (!out.empty() && out.back() >= '0' && out.back() <= '2') out.pop_back();
  return out;
}

std::vector<int> parse_phoneme_string(const std::string& text, const PhonemeSet& set,
                                      const std::string& context) {
  std::vector<int> out;
  std::istringstream ss(text);
  std::string ph;
  while (ss >> ph) {
    const int idx = set.index_of(strip_stress(ph));
    if (idx < 0 || idx == set.blank_index || idx == set.space_index)
      throw UnmappablePhoneme(context + ": symbol '" + ph + "' is not a dictionary phoneme");
    out.push_back(idx);
  }
  return out;
}

}  // namespace

PhonemeSet PhonemeSet::cmu() {
  PhonemeSet set;
  set.symbols.reserve(41);
  set.symbols.emplace_back(kBlankSymbol);
  for (const char* p : kCmuPhonemes) set.symbols.emplace_back(p);
  set.symbols.emplace_back(kSpaceSymbol);
  set.blank_index = 0;
  set.space_index = static_cast<int>(set.symbols.size()) - 1;
  return set;
}

int PhonemeSet::index_of(const std::string& symbol) const {
  for (std::size_t i = 0; i < symbols.size(); ++i)
    if (symbols[i] == symbol) return static_cast<int>(i);
  return -1;
}

std::size_t LyricsDoc::word_count() const {
  std::size_t n = 0;
  for (const auto& line : lines) n += line.size();
  return n;
}

LyricsDoc parse_lyrics(const std::string& text) {
  LyricsDoc doc;
  std::istringstream lines(text);
  std::string line;
  int word_idx = 0;
  while (std::getline(lines, line)) {
    std::vector<Word> words;
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      std::string norm = normalize_token(token);
      if (norm.empty()) continue;
      Word w;
      w.text = std::move(norm);
      w.line_idx = static_cast<int>(doc.lines.size());
      w.word_idx = word_idx++;
      words.push_back(std::move(w));
    }
    if (!words.empty()) doc.lines.push_back(std::move(words));
  }
  if (doc.lines.empty()) throw EmptyLyrics("no word survives normalization");
  return doc;
}

PronouncingDict PronouncingDict::load(const std::filesystem::path& path,
                                      const PhonemeSet& set) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open dictionary " + path.string());
  return from_stream(in, set);
}

PronouncingDict PronouncingDict::from_stream(std::istream& in, const PhonemeSet& set) {
  PronouncingDict dict;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.rfind(";;;", 0) == 0) continue;
    std::istringstream ss(line);
    std::string word;
    if (!(ss >> word)) continue;
    // "WORD(2)" marks an alternate pronunciation; only the first counts.
    const auto paren = word.find('(');
    if (paren != std::string::npos) continue;
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    std::string rest;
    std::getline(ss, rest);
    std::vector<int> phones =
        parse_phoneme_string(rest, set, "dictionary line " + std::to_string(lineno));
    if (phones.empty()) continue;
    dict.entries_.emplace(std::move(word), std::move(phones));
  }
  for (const auto& [letter, spelling] : kSpellings)
    dict.letter_names_.emplace(letter, parse_phoneme_string(spelling, set, "spelling table"));
  return dict;
}

PronouncingDict::Lookup PronouncingDict::lookup(const std::string& word) const {
  if (auto it = entries_.find(word); it != entries_.end())
    return Lookup{it->second, false};
  // Spell it out: dictionary entries for single letters win over the
  // built-in names, so fixture dictionaries can override them.
  Lookup out;
  out.oov = true;
  for (char c : word) {
    const std::string one(1, c);
    if (auto it = entries_.find(one); it != entries_.end()) {
      out.phonemes.insert(out.phonemes.end(), it->second.begin(), it->second.end());
    } else if (auto jt = letter_names_.find(c); jt != letter_names_.end()) {
      out.phonemes.insert(out.phonemes.end(), jt->second.begin(), jt->second.end());
    }
    // apostrophes and unknown characters contribute nothing
  }
  return out;
}

void phonemize(LyricsDoc& doc, const PronouncingDict& dict) {
  doc.oov_words.clear();
  for (auto& line : doc.lines) {
    for (auto& word : line) {
      auto result = dict.lookup(word.text);
      word.phonemes = std::move(result.phonemes);
      word.oov = result.oov;
      if (result.oov) doc.oov_words.push_back(word.text);
    }
  }
}

std::size_t PhonemePlan::min_frames() const {
  std::size_t tokens = 0, forced_blanks = 0;
  int prev_class = -1;
  for (const auto& st : states) {
    if (st.kind == StateKind::blank) continue;
    if (tokens > 0 && st.class_index == prev_class) ++forced_blanks;
    prev_class = st.class_index;
    ++tokens;
  }
  return tokens + forced_blanks;
}

bool plan_skip_allowed(const PhonemePlan& plan, std::size_t s) {
  if (s < 2) return false;
  return plan.states[s - 1].kind == StateKind::blank &&
         plan.states[s].class_index != plan.states[s - 2].class_index;
}

PhonemePlan build_plan(const LyricsDoc& doc, const PhonemeSet& set,
                       BuildPlanOptions opts) {
  if (doc.empty()) throw EmptyLyrics("cannot build a plan from an empty document");

  struct Token {
    int class_index;
    StateKind kind;
    int word_idx;
    bool line_start;
  };
  std::vector<Token> tokens;
  for (std::size_t li = 0; li < doc.lines.size(); ++li) {
    const auto& line = doc.lines[li];
    for (std::size_t wi = 0; wi < line.size(); ++wi) {
      const Word& word = line[wi];
      if (word.phonemes.empty())
        throw FormatError("word '" + word.text + "' has no phonemes; phonemize first");
      const bool between_words = !tokens.empty();
      const bool crossing_line = between_words && wi == 0;
      if (between_words && opts.insert_spaces &&
          (!crossing_line || opts.space_across_lines))
        tokens.push_back({set.space_index, StateKind::space, -1, false});
      bool first_of_line = wi == 0;
      for (int ph : word.phonemes) {
        tokens.push_back({ph, StateKind::phoneme, word.word_idx, first_of_line});
        first_of_line = false;
      }
    }
  }

  PhonemePlan plan;
  plan.n_phone = set.size();
  plan.states.reserve(tokens.size() * 2 + 1);
  const auto blank = [&] {
    return PlanState{set.blank_index, StateKind::blank, -1, false};
  };
  plan.states.push_back(blank());
  for (const Token& tok : tokens) {
    plan.states.push_back({tok.class_index, tok.kind, tok.word_idx, tok.line_start});
    plan.states.push_back(blank());
  }
  return plan;
}

std::vector<WindowSample> window_samples(std::span<const TimedWord> words,
                                         double window, double hop) {
  if (window <= 0.0 || hop <= 0.0)
    throw ConfigError("window and hop must be positive");
  std::vector<WindowSample> out;
  if (words.empty()) return out;
  double last_end = 0.0;
  for (const TimedWord& w : words) last_end = std::max(last_end, w.end);
  for (std::size_t k = 0;; ++k) {
    const double start = static_cast<double>(k) * hop;
    if (start > last_end) break;
    WindowSample sample;
    sample.start = start;
    for (std::size_t i = 0; i < words.size(); ++i)
      if (words[i].start >= start && words[i].end <= start + window)
        sample.covered.push_back(static_cast<int>(i));
    out.push_back(std::move(sample));
  }
  return out;
}

}  // namespace lyra
