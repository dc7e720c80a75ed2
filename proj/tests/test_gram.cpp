#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lyra/gram.hpp"
#include "lyra/synth.hpp"
#include "testutil.hpp"

using namespace lyra;
namespace fs = std::filesystem;

namespace {

// straight-line reimplementation of the pooling, kept deliberately naive
std::vector<double> naive_pool(const JointTensor& t, bool over_pitch) {
  const std::size_t out_classes = over_pitch ? t.n_phone : t.n_pitch;
  std::vector<double> out(t.frames * out_classes);
  for (std::size_t f = 0; f < t.frames; ++f) {
    std::vector<double> m(out_classes, 0.0);
    for (std::size_t c = 0; c < out_classes; ++c) {
      double s = 0.0;
      if (over_pitch) {
        for (std::size_t k = 0; k < t.n_pitch; ++k) s += t.at(f, c, k);
        m[c] = s / static_cast<double>(t.n_pitch);
      } else {
        for (std::size_t p = 0; p < t.n_phone; ++p) s += t.at(f, p, c);
        m[c] = s / static_cast<double>(t.n_phone);
      }
    }
    double mx = m[0];
    for (double v : m) mx = std::max(mx, v);
    double z = 0.0;
    for (double v : m) z += std::exp(v - mx);
    const double lse = mx + std::log(z);
    for (std::size_t c = 0; c < out_classes; ++c) out[f * out_classes + c] = m[c] - lse;
  }
  return out;
}

JointTensor random_tensor(std::mt19937_64& rng, std::size_t frames, std::size_t n_phone,
                          std::size_t n_pitch, double scale = 2.0) {
  JointTensor t;
  t.frames = frames;
  t.n_phone = n_phone;
  t.n_pitch = n_pitch;
  t.data.resize(frames * n_phone * n_pitch);
  for (auto& v : t.data) v = scale * normal(rng);
  return t;
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("lyra_gram_test_" + name);
}

}  // namespace

TEST_CASE("pooling a tensor constant over pitch is a plain log softmax") {
  std::mt19937_64 rng(1);
  JointTensor t;
  t.frames = 3;
  t.n_phone = 4;
  t.n_pitch = 5;
  t.data.resize(3 * 4 * 5);
  std::vector<double> z(3 * 4);
  for (auto& v : z) v = 2.0 * normal(rng);
  for (std::size_t f = 0; f < 3; ++f)
    for (std::size_t p = 0; p < 4; ++p)
      for (std::size_t k = 0; k < 5; ++k) t.at(f, p, k) = z[f * 4 + p];

  const Posteriorgram out = pool_phoneme(t);
  for (std::size_t f = 0; f < 3; ++f) {
    double mx = z[f * 4];
    for (std::size_t p = 0; p < 4; ++p) mx = std::max(mx, z[f * 4 + p]);
    double s = 0.0;
    for (std::size_t p = 0; p < 4; ++p) s += std::exp(z[f * 4 + p] - mx);
    const double lse = mx + std::log(s);
    for (std::size_t p = 0; p < 4; ++p)
      CHECK(out.at(f, p) == doctest::Approx(z[f * 4 + p] - lse).epsilon(1e-12));
  }
}

TEST_CASE("pooling the 1x2x2 symmetric example gives log one-half") {
  JointTensor t;
  t.frames = 1;
  t.n_phone = 2;
  t.n_pitch = 2;
  t.data = {0.0, 2.0, 1.0, 1.0};  // [[0,2],[1,1]]
  const Posteriorgram ph = pool_phoneme(t);
  CHECK(ph.at(0, 0) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(ph.at(0, 1) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  const Posteriorgram pi = pool_pitch(t);  // means over phonemes: [0.5, 1.5]
  CHECK(std::exp(pi.at(0, 0)) + std::exp(pi.at(0, 1)) == doctest::Approx(1.0));
  CHECK(pi.at(0, 1) > pi.at(0, 0));
}

TEST_CASE("pooling matches the naive oracle to 1e-12") {
  std::mt19937_64 rng(2);
  const JointTensor t = random_tensor(rng, 3, 4, 5);
  const Posteriorgram ph = pool_phoneme(t);
  const Posteriorgram pi = pool_pitch(t);
  const auto oracle_ph = naive_pool(t, true);
  const auto oracle_pi = naive_pool(t, false);
  for (std::size_t i = 0; i < ph.data.size(); ++i)
    CHECK(std::abs(ph.data[i] - oracle_ph[i]) <= 1e-12);
  for (std::size_t i = 0; i < pi.data.size(); ++i)
    CHECK(std::abs(pi.data[i] - oracle_pi[i]) <= 1e-12);
}

TEST_CASE("pooled outputs are normalized and shift-invariant") {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 25; ++it) {
    const auto frames = 1 + uniform_index(rng, 6);
    const auto n_phone = 2 + uniform_index(rng, 5);
    const auto n_pitch = 2 + uniform_index(rng, 5);
    const JointTensor t = random_tensor(rng, frames, n_phone, n_pitch);
    const Posteriorgram ph = pool_phoneme(t);
    const Posteriorgram pi = pool_pitch(t);
    CHECK(ph.normalization_error() <= 1e-6);
    CHECK(pi.normalization_error() <= 1e-6);

    JointTensor shifted = t;
    const double c = 10.0 * (uniform_real(rng) - 0.5);
    for (auto& v : shifted.data) v += c;
    const Posteriorgram ph2 = pool_phoneme(shifted);
    for (std::size_t i = 0; i < ph.data.size(); ++i)
      CHECK(std::abs(ph.data[i] - ph2.data[i]) <= 1e-9);
    const Posteriorgram pi2 = pool_pitch(shifted);
    for (std::size_t i = 0; i < pi.data.size(); ++i)
      CHECK(std::abs(pi.data[i] - pi2.data[i]) <= 1e-9);
  }
}

TEST_CASE("pooling commutes with frame permutation") {
  std::mt19937_64 rng(4);
  const JointTensor t = random_tensor(rng, 5, 3, 4);
  std::vector<std::size_t> perm = {3, 1, 4, 0, 2};
  JointTensor permuted = t;
  for (std::size_t f = 0; f < 5; ++f)
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t k = 0; k < 4; ++k) permuted.at(f, p, k) = t.at(perm[f], p, k);
  const Posteriorgram a = pool_phoneme(permuted);
  const Posteriorgram b = pool_phoneme(t);
  for (std::size_t f = 0; f < 5; ++f)
    for (std::size_t p = 0; p < 3; ++p) CHECK(a.at(f, p) == b.at(perm[f], p));
}

TEST_CASE("PGRM files round trip bit-exactly") {
  std::mt19937_64 rng(5);
  JointTensor t = random_tensor(rng, 4, 3, 2);
  // store f32-representable payload so quantization is a no-op
  for (auto& v : t.data) v = static_cast<double>(static_cast<float>(v));
  t.clock = {16000.0, 160.0, 2.0};

  const fs::path p1 = temp_file("round1.pgrm");
  const fs::path p2 = temp_file("round2.pgrm");
  write_gram(t, p1);
  const JointTensor back = read_joint(p1);
  CHECK(back.frames == t.frames);
  CHECK(back.n_phone == t.n_phone);
  CHECK(back.n_pitch == t.n_pitch);
  CHECK(back.data == t.data);
  CHECK(back.clock.sample_rate == t.clock.sample_rate);
  CHECK(back.clock.hop == t.clock.hop);
  CHECK(back.clock.decimation == t.clock.decimation);

  write_gram(back, p2);
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  fs::remove(p1);
  fs::remove(p2);
}

namespace {

std::string pgrm_bytes(char version, std::uint8_t rank, std::uint8_t kind,
                       const std::vector<std::uint32_t>& dims, std::size_t n_floats) {
  std::string b = "PGR";
  b.push_back(version);
  b.push_back(static_cast<char>(rank));
  b.push_back(static_cast<char>(kind));
  b.push_back(0);
  b.push_back(0);
  for (std::uint32_t d : dims)
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((d >> (8 * i)) & 0xff));
  for (int c = 0; c < 3; ++c) {
    const double v = c == 0 ? 22050.0 : (c == 1 ? 256.0 : 1.0);
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  for (std::size_t i = 0; i < n_floats; ++i) {
    const float v = 0.0f;
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    for (int k = 0; k < 4; ++k) b.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
  }
  return b;
}

fs::path write_bytes(const std::string& name, const std::string& bytes) {
  const fs::path p = temp_file(name);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
  return p;
}

}  // namespace

TEST_CASE("PGRM header mismatches raise the named errors") {
  const fs::path shape = write_bytes("shape.pgrm", pgrm_bytes('1', 2, 1, {2, 3}, 5));
  CHECK_THROWS_AS(read_gram(shape), ShapeMismatch);
  fs::remove(shape);

  const fs::path magic = write_bytes("magic.pgrm", "XGRM garbage");
  CHECK_THROWS_AS(read_gram(magic), BadMagic);
  fs::remove(magic);

  const fs::path version = write_bytes("version.pgrm", pgrm_bytes('2', 2, 1, {1, 1}, 1));
  CHECK_THROWS_AS(read_gram(version), UnsupportedVersion);
  fs::remove(version);
}

TEST_CASE("rank-3 PGRM files parse as joint tensors") {
  const fs::path p = write_bytes("rank3.pgrm", pgrm_bytes('1', 3, 0, {1, 2, 3}, 6));
  const Gram g = read_gram(p);
  CHECK(std::holds_alternative<JointTensor>(g));
  fs::remove(p);
}

TEST_CASE("JSON grams round trip") {
  std::mt19937_64 rng(6);
  const Posteriorgram p = random_posteriorgram(rng, 3, 4);
  const fs::path path = temp_file("gram.json");
  write_gram(p, path);
  const Posteriorgram back = read_posteriorgram(path);
  CHECK(back.frames == p.frames);
  CHECK(back.classes == p.classes);
  CHECK(back.kind == p.kind);
  CHECK(back.data == p.data);  // JSON carries full double precision
  fs::remove(path);

  const JointTensor t = random_tensor(rng, 2, 3, 4);
  const fs::path jpath = temp_file("joint.json");
  write_gram(t, jpath);
  const JointTensor jback = read_joint(jpath);
  CHECK(jback.n_pitch == t.n_pitch);
  CHECK(jback.data == t.data);
  fs::remove(jpath);
}

TEST_CASE("boundary grams must be single-class with nonpositive entries") {
  Posteriorgram p;
  p.frames = 2;
  p.classes = 1;
  p.kind = GramKind::boundary;
  p.data = {std::log(0.5), 0.0};
  CHECK_NOTHROW(validate(p));
  p.data[0] = 0.5;  // probability, not log-probability
  CHECK_THROWS_AS(validate(p), FormatError);
  p.data[0] = std::log(0.5);
  p.classes = 2;
  p.data = {0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(validate(p), ShapeMismatch);
}

TEST_CASE("pitch layout maps classes to semitones") {
  const PitchLayout d2b5 = PitchLayout::d2_b5();
  CHECK(d2b5.n_classes == 47);
  CHECK(d2b5.class_to_midi(1) == 38);   // D2
  CHECK(d2b5.class_to_midi(46) == 83);  // B5
  CHECK(d2b5.midi_to_class(60) == 23);
  const PitchLayout d2c6 = PitchLayout::d2_c6();
  CHECK(d2c6.n_classes == 48);
  CHECK(d2c6.class_to_midi(47) == 84);  // C6
  CHECK_THROWS_AS(PitchLayout::from_class_count(46), ConfigError);
}
