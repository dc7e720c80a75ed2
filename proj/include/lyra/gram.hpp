#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include "lyra/errors.hpp"

namespace lyra {

// Frame-time geometry of a posteriorgram. One output frame covers
// hop * decimation input samples; frame f starts at f * frame_period().
struct FrameClock {
  double sample_rate = 22050.0;
  double hop = 256.0;
  double decimation = 1.0;

  double frame_period() const { return hop * decimation / sample_rate; }
  double frame_time(std::size_t frame) const {
    return static_cast<double>(frame) * frame_period();
  }
};

enum class GramKind : std::uint8_t { joint = 0, phoneme = 1, pitch = 2, boundary = 3 };

const char* gram_kind_name(GramKind kind);
GramKind gram_kind_from_name(const std::string& name);

// Order-3 array of raw scores (pre-softmax), shape frames x n_phone x n_pitch.
struct JointTensor {
  std::size_t frames = 0;
  std::size_t n_phone = 0;
  std::size_t n_pitch = 0;
  std::vector<double> data;  // row-major [t][p][k]
  FrameClock clock;

  double at(std::size_t t, std::size_t p, std::size_t k) const {
    return data[(t * n_phone + p) * n_pitch + k];
  }
  double& at(std::size_t t, std::size_t p, std::size_t k) {
    return data[(t * n_phone + p) * n_pitch + k];
  }
};

// 2-D matrix of log-probabilities, shape frames x classes. For phoneme and
// pitch kinds every row is normalized (logsumexp == 0); for boundary kind
// classes == 1 and entries are logs of values in [0, 1].
struct Posteriorgram {
  std::size_t frames = 0;
  std::size_t classes = 0;
  GramKind kind = GramKind::phoneme;
  std::vector<double> data;  // row-major [t][c]
  FrameClock clock;

  double at(std::size_t t, std::size_t c) const { return data[t * classes + c]; }
  double& at(std::size_t t, std::size_t c) { return data[t * classes + c]; }

  // Largest per-frame |logsumexp(row)| deviation from 0.
  double normalization_error() const;
};

// Semitone layout of the pitch class axis. Class 0 is silence, classes
// 1..n_classes-1 are consecutive semitones starting at midi_lo. The default
// spans D2 (MIDI 38) through B5 (MIDI 83), 47 classes total; d2_c6() extends
// to C6 (MIDI 84) for 48 classes.
struct PitchLayout {
  int n_classes = 47;
  int midi_lo = 38;

  static constexpr int kSilenceClass = 0;
  static PitchLayout d2_b5() { return PitchLayout{47, 38}; }
  static PitchLayout d2_c6() { return PitchLayout{48, 38}; }
  static PitchLayout from_class_count(int n);

  int class_to_midi(int cls) const { return midi_lo + cls - 1; }
  int midi_to_class(int midi) const { return midi - midi_lo + 1; }
  bool midi_in_range(int midi) const {
    return midi >= midi_lo && midi < midi_lo + n_classes - 1;
  }
};

void validate(const JointTensor& t);
void validate(const Posteriorgram& p, double norm_tol = 1e-4);

// Average-pool the pitch axis, then log-softmax each frame over phonemes.
Posteriorgram pool_phoneme(const JointTensor& t);
// Average-pool the phoneme axis, then log-softmax each frame over pitches.
Posteriorgram pool_pitch(const JointTensor& t);

using Gram = std::variant<JointTensor, Posteriorgram>;

// PGRM container, binary or JSON. Binary files are
//
//   bytes 0..3   magic "PGR1" ("PGR" + format version digit)
//   byte  4      u8 rank (3 = joint tensor, 2 = posteriorgram)
//   byte  5      u8 kind tag (GramKind)
//   bytes 6..7   u16 LE reserved, zero
//   next rank*4  u32 LE dims, outermost first
//   next 24      f64 LE sample_rate, hop, decimation
//   rest         f32 LE payload, row-major; length must equal prod(dims)
//
// JSON files carry the same fields as
//   {"dims": [...], "kind": "...", "clock": {...}, "data": [...]}.
// read_gram sniffs the magic to pick the decoding; write_gram picks JSON
// when the path ends in ".json".
Gram read_gram(const std::filesystem::path& path);
void write_gram(const JointTensor& t, const std::filesystem::path& path);
void write_gram(const Posteriorgram& p, const std::filesystem::path& path);

// Convenience accessors that fail loudly when the file holds the other type.
JointTensor read_joint(const std::filesystem::path& path);
Posteriorgram read_posteriorgram(const std::filesystem::path& path);

}  // namespace lyra
