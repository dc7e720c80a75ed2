#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyra/align.hpp"
#include "lyra/lexicon.hpp"
#include "lyra/notes.hpp"

namespace lyra {

// JSON schemas for the on-disk artifacts; see docs/FORMATS.md. Readers
// ignore unknown fields so reports and truth bundles stay interchangeable.

nlohmann::json load_json(const std::filesystem::path& path);
void save_json(const nlohmann::json& j, const std::filesystem::path& path);
std::string dump_json(const nlohmann::json& j);

nlohmann::json plan_to_json(const PhonemePlan& plan);
PhonemePlan plan_from_json(const nlohmann::json& j);

// words: [{"word","line","onset","offset"}...], lines: [{"line","onset","offset"}...]
nlohmann::json spans_to_json(const Spans& spans, const std::vector<std::string>& word_texts);
Spans spans_from_json(const nlohmann::json& j);

nlohmann::json notes_to_json(const std::vector<NoteEvent>& notes);
// Accepts a bare array or an object with a "notes" field.
std::vector<NoteEvent> notes_from_json(const nlohmann::json& j);

nlohmann::json events_to_json(const std::vector<double>& events);
// Accepts a bare array or an object with an "events" field.
std::vector<double> events_from_json(const nlohmann::json& j);

// Accepts a bare array or an object with a "words" field of
// [{"start","end"}...].
std::vector<TimedWord> timed_words_from_json(const nlohmann::json& j);

// Line-level karaoke export: one "[mm:ss.cc]text" row per line span.
std::string to_lrc(const std::vector<LineSpan>& lines,
                   const std::vector<std::string>& line_texts);

}  // namespace lyra
