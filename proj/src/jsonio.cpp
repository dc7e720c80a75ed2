#include "lyra/jsonio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lyra {

using nlohmann::json;

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw FormatError(path.string() + ": not valid JSON");
  return j;
}

void save_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

namespace {

double need_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw FormatError(where + ": missing numeric field '" + key + "'");
  return j.at(key).get<double>();
}

StateKind state_kind_from_name(const std::string& name, const std::string& where) {
  if (name == "blank") return StateKind::blank;
  if (name == "phoneme") return StateKind::phoneme;
  if (name == "space") return StateKind::space;
  throw FormatError(where + ": unknown state kind '" + name + "'");
}

const char* state_kind_name(StateKind kind) {
  switch (kind) {
    case StateKind::blank: return "blank";
    case StateKind::phoneme: return "phoneme";
    case StateKind::space: return "space";
  }
  return "?";
}

}  // namespace

json plan_to_json(const PhonemePlan& plan) {
  json states = json::array();
  for (const auto& st : plan.states) {
    json s = {
        {"class", st.class_index},
        {"kind", state_kind_name(st.kind)},
        {"line_start", st.is_line_start},
    };
    if (st.word_idx >= 0)
      s["word"] = st.word_idx;
    else
      s["word"] = nullptr;
    states.push_back(std::move(s));
  }
  return json{{"schema", "lyralign/plan@1"}, {"n_phone", plan.n_phone}, {"states", states}};
}

PhonemePlan plan_from_json(const json& j) {
  if (!j.contains("states") || !j.at("states").is_array())
    throw FormatError("plan: missing 'states' array");
  PhonemePlan plan;
  plan.n_phone = j.contains("n_phone") ? j.at("n_phone").get<int>() : 41;
  std::size_t i = 0;
  for (const auto& s : j.at("states")) {
    const std::string where = "plan state " + std::to_string(i++);
    PlanState st;
    st.class_index = static_cast<int>(need_number(s, "class", where));
    st.kind = state_kind_from_name(s.value("kind", "phoneme"), where);
    st.is_line_start = s.value("line_start", false);
    if (s.contains("word") && !s.at("word").is_null())
      st.word_idx = s.at("word").get<int>();
    plan.states.push_back(st);
  }
  if (plan.states.empty()) throw FormatError("plan: no states");
  return plan;
}

json spans_to_json(const Spans& spans, const std::vector<std::string>& word_texts) {
  json words = json::array();
  for (const auto& w : spans.words) {
    json entry = {
        {"word", static_cast<std::size_t>(w.word_idx) < word_texts.size()
                     ? word_texts[static_cast<std::size_t>(w.word_idx)]
                     : ""},
        {"line", w.line_idx},
        {"onset", w.onset},
        {"offset", w.offset},
    };
    words.push_back(std::move(entry));
  }
  json lines = json::array();
  for (const auto& l : spans.lines)
    lines.push_back({{"line", l.line_idx}, {"onset", l.onset}, {"offset", l.offset}});
  return json{{"words", words}, {"lines", lines}};
}

Spans spans_from_json(const json& j) {
  Spans spans;
  if (!j.contains("words") || !j.at("words").is_array())
    throw FormatError("alignment: missing 'words' array");
  int idx = 0;
  for (const auto& w : j.at("words")) {
    const std::string where = "word " + std::to_string(idx);
    WordSpan span;
    span.word_idx = idx++;
    span.line_idx = static_cast<int>(w.value("line", 0));
    span.onset = need_number(w, "onset", where);
    span.offset = need_number(w, "offset", where);
    spans.words.push_back(span);
  }
  if (j.contains("lines")) {
    int li = 0;
    for (const auto& l : j.at("lines")) {
      const std::string where = "line " + std::to_string(li++);
      LineSpan span;
      span.line_idx = static_cast<int>(l.value("line", li - 1));
      span.onset = need_number(l, "onset", where);
      span.offset = need_number(l, "offset", where);
      spans.lines.push_back(span);
    }
  }
  return spans;
}

json notes_to_json(const std::vector<NoteEvent>& notes) {
  json arr = json::array();
  for (const auto& n : notes)
    arr.push_back({{"onset", n.onset}, {"offset", n.offset}, {"midi", n.midi}});
  return arr;
}

std::vector<NoteEvent> notes_from_json(const json& j) {
  const json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("notes")) throw FormatError("notes: expected an array or a 'notes' field");
    arr = &j.at("notes");
  }
  if (!arr->is_array()) throw FormatError("notes: expected an array");
  std::vector<NoteEvent> notes;
  int idx = 0;
  for (const auto& e : *arr) {
    const std::string where = "note " + std::to_string(idx++);
    NoteEvent n;
    n.onset = need_number(e, "onset", where);
    n.offset = need_number(e, "offset", where);
    n.midi = static_cast<int>(need_number(e, "midi", where));
    notes.push_back(n);
  }
  return notes;
}

json events_to_json(const std::vector<double>& events) {
  return json{{"events", events}};
}

std::vector<double> events_from_json(const json& j) {
  const json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("events"))
      throw FormatError("events: expected an array or an 'events' field");
    arr = &j.at("events");
  }
  if (!arr->is_array()) throw FormatError("events: expected an array");
  std::vector<double> events;
  for (const auto& e : *arr) {
    if (!e.is_number()) throw FormatError("events: entries must be numbers");
    events.push_back(e.get<double>());
  }
  return events;
}

std::vector<TimedWord> timed_words_from_json(const json& j) {
  const json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("words"))
      throw FormatError("timed words: expected an array or a 'words' field");
    arr = &j.at("words");
  }
  if (!arr->is_array()) throw FormatError("timed words: expected an array");
  std::vector<TimedWord> words;
  int idx = 0;
  for (const auto& w : *arr) {
    const std::string where = "timed word " + std::to_string(idx++);
    TimedWord tw;
    tw.start = need_number(w, "start", where);
    tw.end = need_number(w, "end", where);
    words.push_back(tw);
  }
  return words;
}

std::string to_lrc(const std::vector<LineSpan>& lines,
                   const std::vector<std::string>& line_texts) {
  std::ostringstream out;
  for (const auto& l : lines) {
    const double t = std::max(0.0, l.onset);
    const auto total_cs = static_cast<long long>(std::llround(t * 100.0));
    const long long mins = total_cs / 6000;
    const long long secs = (total_cs / 100) % 60;
    const long long cs = total_cs % 100;
    char stamp[32];
    std::snprintf(stamp, sizeof(stamp), "[%02lld:%02lld.%02lld]", mins, secs, cs);
    out << stamp;
    if (static_cast<std::size_t>(l.line_idx) < line_texts.size())
      out << line_texts[static_cast<std::size_t>(l.line_idx)];
    out << "\n";
  }
  return out.str();
}

}  // namespace lyra
