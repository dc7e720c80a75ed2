#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lyra/align.hpp"
#include "lyra/gram.hpp"
#include "lyra/metrics.hpp"

namespace lyra {

// Resolved run configuration. Defaults are the published operating points;
// every CLI report embeds the echo() of whatever was resolved, so results
// always carry their provenance.
struct RunConfig {
  double lambda = 0.5;           // pitch loss weight in the total loss
  double alpha = 0.8;            // boundary bonus weight
  std::string bdr_mode = "entry";
  double pco_tol = 0.3;          // seconds
  double bdr_window = 0.5;       // seconds, boundary hit tolerance (+/-)
  double gaussian_width = 0.7;   // seconds, boundary target window length
  double onset_tol = 0.05;       // seconds, note onset tolerance
  double offset_ratio = 0.2;     // note offset tolerance = max(min, ratio*dur)
  double offset_min = 0.05;      // seconds
  double pitch_tol_cents = 50.0;
  bool octave_wrap = true;
  int n_pitch = 47;              // 47 = up to B5, 48 = up to C6
  double sample_rate = 22050.0;
  double hop = 256.0;
  double decimation = 1.0;
  bool insert_spaces = true;
  bool line_break_space = true;
  double note_min_dur = 0.05;    // seconds
  double merge_gap = 0.0;        // seconds, 0 = off
  double binarize_at = 0.5;      // AUC target threshold
  int jobs = 1;

  FrameClock clock() const { return FrameClock{sample_rate, hop, decimation}; }
  PitchLayout pitch_layout() const;
  BdrConfig bdr_config() const;
  NoteMatchConfig note_match() const;

  nlohmann::json echo() const;

  // key = value lines, '#' comments; unknown keys are ConfigError.
  void apply_file(const std::filesystem::path& path);
  void apply_key(const std::string& key, const std::string& value);
  void validate() const;
};

}  // namespace lyra
