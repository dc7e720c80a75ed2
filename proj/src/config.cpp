#include "lyra/config.hpp"

#include <fstream>
#include <sstream>

namespace lyra {

using nlohmann::json;

PitchLayout RunConfig::pitch_layout() const {
  return PitchLayout::from_class_count(n_pitch);
}

BdrConfig RunConfig::bdr_config() const {
  return BdrConfig{alpha, bdr_mode_from_name(bdr_mode)};
}

NoteMatchConfig RunConfig::note_match() const {
  NoteMatchConfig cfg;
  cfg.onset_tol = onset_tol;
  cfg.offset_ratio = offset_ratio;
  cfg.offset_min = offset_min;
  cfg.pitch_tol_cents = pitch_tol_cents;
  cfg.octave_wrap = octave_wrap;
  return cfg;
}

json RunConfig::echo() const {
  return json{
      {"lambda", lambda},
      {"alpha", alpha},
      {"bdr_mode", bdr_mode},
      {"pco_tol", pco_tol},
      {"bdr_window", bdr_window},
      {"gaussian_width", gaussian_width},
      {"onset_tol", onset_tol},
      {"offset_ratio", offset_ratio},
      {"offset_min", offset_min},
      {"pitch_tol_cents", pitch_tol_cents},
      {"octave_wrap", octave_wrap},
      {"n_pitch", n_pitch},
      {"sample_rate", sample_rate},
      {"hop", hop},
      {"decimation", decimation},
      {"insert_spaces", insert_spaces},
      {"line_break_space", line_break_space},
      {"note_min_dur", note_min_dur},
      {"merge_gap", merge_gap},
      {"binarize_at", binarize_at},
  };
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' needs a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw ConfigError("config key '" + key + "' needs a boolean, got '" + value + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void RunConfig::apply_key(const std::string& key, const std::string& value) {
  if (key == "lambda") lambda = parse_double(key, value);
  else if (key == "alpha") alpha = parse_double(key, value);
  else if (key == "bdr_mode") { bdr_mode_from_name(value); bdr_mode = value; }
  else if (key == "pco_tol") pco_tol = parse_double(key, value);
  else if (key == "bdr_window") bdr_window = parse_double(key, value);
  else if (key == "gaussian_width") gaussian_width = parse_double(key, value);
  else if (key == "onset_tol") onset_tol = parse_double(key, value);
  else if (key == "offset_ratio") offset_ratio = parse_double(key, value);
  else if (key == "offset_min") offset_min = parse_double(key, value);
  else if (key == "pitch_tol_cents") pitch_tol_cents = parse_double(key, value);
  else if (key == "octave_wrap") octave_wrap = parse_bool(key, value);
  else if (key == "n_pitch") n_pitch = static_cast<int>(parse_double(key, value));
  else if (key == "sample_rate") sample_rate = parse_double(key, value);
  else if (key == "hop") hop = parse_double(key, value);
  else if (key == "decimation") decimation = parse_double(key, value);
  else if (key == "insert_spaces") insert_spaces = parse_bool(key, value);
  else if (key == "line_break_space") line_break_space = parse_bool(key, value);
  else if (key == "note_min_dur") note_min_dur = parse_double(key, value);
  else if (key == "merge_gap") merge_gap = parse_double(key, value);
  else if (key == "binarize_at") binarize_at = parse_double(key, value);
  else if (key == "jobs") jobs = static_cast<int>(parse_double(key, value));
  else throw ConfigError("unknown config key '" + key + "'");
}

void RunConfig::apply_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    apply_key(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void RunConfig::validate() const {
  const auto positive = [](const char* name, double v) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive("pco_tol", pco_tol);
  positive("bdr_window", bdr_window);
  positive("gaussian_width", gaussian_width);
  positive("onset_tol", onset_tol);
  positive("offset_ratio", offset_ratio);
  positive("offset_min", offset_min);
  positive("pitch_tol_cents", pitch_tol_cents);
  positive("sample_rate", sample_rate);
  positive("hop", hop);
  positive("decimation", decimation);
  positive("note_min_dur", note_min_dur);
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  if (alpha < 0.0) throw ConfigError("alpha must be nonnegative");
  if (merge_gap < 0.0) throw ConfigError("merge_gap must be nonnegative");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  bdr_mode_from_name(bdr_mode);
  PitchLayout::from_class_count(n_pitch);
}

}  // namespace lyra
