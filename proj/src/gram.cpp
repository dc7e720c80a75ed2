#include "lyra/gram.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lyra/logmath.hpp"

namespace lyra {

namespace {

void append_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void append_u32le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_f32le(std::string& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  append_u32le(out, bits);
}

void append_f64le(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class ByteReader {
public:
  ByteReader(const std::string& buf, const std::string& name) : buf_(buf), name_(name) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(byte()); }

  std::uint16_t u16le() {
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(byte()) << (8 * i);
    return v;
  }

  std::uint32_t u32le() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return v;
  }

  float f32le() {
    std::uint32_t bits = u32le();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  double f64le() {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(byte()) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

  std::size_t remaining() const { return buf_.size() - pos_; }

private:
  unsigned char byte() {
    if (pos_ >= buf_.size())
      throw ShapeMismatch(name_ + ": truncated PGRM header");
    return static_cast<unsigned char>(buf_[pos_++]);
  }

  const std::string& buf_;
  std::string name_;
  std::size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write to " + path.string());
}

std::string encode_pgrm(GramKind kind, const std::vector<std::uint32_t>& dims,
                        const FrameClock& clock, const std::vector<double>& data) {
  std::string out;
  out.reserve(32 + dims.size() * 4 + data.size() * 4);
  out += "PGR1";
  out.push_back(static_cast<char>(dims.size()));
  out.push_back(static_cast<char>(kind));
  append_u16le(out, 0);
  for (std::uint32_t d : dims) append_u32le(out, d);
  append_f64le(out, clock.sample_rate);
  append_f64le(out, clock.hop);
  append_f64le(out, clock.decimation);
  for (double v : data) append_f32le(out, static_cast<float>(v));
  return out;
}

nlohmann::json clock_to_json(const FrameClock& clock) {
  return {{"sample_rate", clock.sample_rate}, {"hop", clock.hop}, {"decimation", clock.decimation}};
}

FrameClock clock_from_json(const nlohmann::json& j) {
  FrameClock c;
  if (j.contains("sample_rate")) c.sample_rate = j.at("sample_rate").get<double>();
  if (j.contains("hop")) c.hop = j.at("hop").get<double>();
  if (j.contains("decimation")) c.decimation = j.at("decimation").get<double>();
  return c;
}

Gram gram_from_parts(const std::string& name, GramKind kind,
                     const std::vector<std::uint64_t>& dims, const FrameClock& clock,
                     std::vector<double> data) {
  std::uint64_t want = 1;
  for (std::uint64_t d : dims) want *= d;
  if (want != data.size())
    throw ShapeMismatch(name + ": payload holds " + std::to_string(data.size()) +
                        " values, dims need " + std::to_string(want));
  for (double v : data)
    if (!std::isfinite(v)) throw FormatError(name + ": non-finite payload value");

  if (dims.size() == 3) {
    if (kind != GramKind::joint)
      throw FormatError(name + ": rank-3 data must have kind 'joint'");
    JointTensor t;
    t.frames = dims[0];
    t.n_phone = dims[1];
    t.n_pitch = dims[2];
    t.data = std::move(data);
    t.clock = clock;
    validate(t);
    return t;
  }
  if (dims.size() == 2) {
    if (kind == GramKind::joint)
      throw FormatError(name + ": rank-2 data cannot have kind 'joint'");
    Posteriorgram p;
    p.frames = dims[0];
    p.classes = dims[1];
    p.kind = kind;
    p.data = std::move(data);
    p.clock = clock;
    return p;
  }
  throw FormatError(name + ": unsupported rank " + std::to_string(dims.size()));
}

Gram decode_pgrm(const std::string& bytes, const std::string& name) {
  if (bytes.size() < 4 || bytes.compare(0, 3, "PGR") != 0)
    throw BadMagic(name + ": not a PGRM file");
  if (bytes[3] != '1')
    throw UnsupportedVersion(name + ": PGRM version '" + std::string(1, bytes[3]) +
                             "' not supported");
  ByteReader r(bytes, name);
  r.u32le();  // magic, already checked
  const std::uint8_t rank = r.u8();
  const std::uint8_t kind_tag = r.u8();
  r.u16le();  // reserved
  if (rank != 2 && rank != 3)
    throw FormatError(name + ": unsupported rank " + std::to_string(rank));
  if (kind_tag > static_cast<std::uint8_t>(GramKind::boundary))
    throw FormatError(name + ": unknown kind tag " + std::to_string(kind_tag));
  std::vector<std::uint64_t> dims(rank);
  for (auto& d : dims) d = r.u32le();
  FrameClock clock;
  clock.sample_rate = r.f64le();
  clock.hop = r.f64le();
  clock.decimation = r.f64le();

  std::uint64_t count = 1;
  for (std::uint64_t d : dims) count *= d;
  if (r.remaining() != count * 4)
    throw ShapeMismatch(name + ": payload is " + std::to_string(r.remaining()) +
                        " bytes, dims need " + std::to_string(count * 4));
  std::vector<double> data(count);
  for (auto& v : data) v = static_cast<double>(r.f32le());
  return gram_from_parts(name, static_cast<GramKind>(kind_tag), dims, clock,
                         std::move(data));
}

Gram decode_json(const std::string& text, const std::string& name) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw FormatError(name + ": not valid JSON");
  if (!j.contains("dims") || !j.contains("data"))
    throw FormatError(name + ": JSON gram needs 'dims' and 'data'");
  std::vector<std::uint64_t> dims = j.at("dims").get<std::vector<std::uint64_t>>();
  std::vector<double> data = j.at("data").get<std::vector<double>>();
  GramKind kind = dims.size() == 3 ? GramKind::joint : GramKind::phoneme;
  if (j.contains("kind")) kind = gram_kind_from_name(j.at("kind").get<std::string>());
  FrameClock clock;
  if (j.contains("clock")) clock = clock_from_json(j.at("clock"));
  return gram_from_parts(name, kind, dims, clock, std::move(data));
}

}  // namespace

const char* gram_kind_name(GramKind kind) {
  switch (kind) {
    case GramKind::joint: return "joint";
    case GramKind::phoneme: return "phoneme";
    case GramKind::pitch: return "pitch";
    case GramKind::boundary: return "boundary";
  }
  return "?";
}

GramKind gram_kind_from_name(const std::string& name) {
  if (name == "joint") return GramKind::joint;
  if (name == "phoneme") return GramKind::phoneme;
  if (name == "pitch") return GramKind::pitch;
  if (name == "boundary") return GramKind::boundary;
  throw FormatError("unknown gram kind '" + name + "'");
}

double Posteriorgram::normalization_error() const {
  double worst = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    const double lse = logsumexp(std::span<const double>(data.data() + t * classes, classes));
    worst = std::max(worst, std::abs(lse));
  }
  return worst;
}

PitchLayout PitchLayout::from_class_count(int n) {
  if (n != 47 && n != 48)
    throw ConfigError("pitch class count must be 47 or 48, got " + std::to_string(n));
  return PitchLayout{n, 38};
}

void validate(const JointTensor& t) {
  if (t.frames < 1 || t.n_phone < 1 || t.n_pitch < 1)
    throw ShapeMismatch("joint tensor must have positive dims");
  if (t.data.size() != t.frames * t.n_phone * t.n_pitch)
    throw ShapeMismatch("joint tensor data size does not match dims");
  for (double v : t.data)
    if (!std::isfinite(v)) throw FormatError("joint tensor holds a non-finite value");
  if (t.clock.frame_period() <= 0.0)
    throw FormatError("frame period must be positive");
}

void validate(const Posteriorgram& p, double norm_tol) {
  if (p.frames < 1 || p.classes < 1)
    throw ShapeMismatch("posteriorgram must have positive dims");
  if (p.data.size() != p.frames * p.classes)
    throw ShapeMismatch("posteriorgram data size does not match dims");
  if (p.clock.frame_period() <= 0.0)
    throw FormatError("frame period must be positive");
  if (p.kind == GramKind::boundary) {
    if (p.classes != 1)
      throw ShapeMismatch("boundary posteriorgram must have exactly one class");
    for (double v : p.data)
      if (!(v <= 1e-9))
        throw FormatError("boundary log-probabilities must be <= 0");
  } else {
    const double err = p.normalization_error();
    if (err > norm_tol)
      throw FormatError("posteriorgram rows are not normalized (worst |logsumexp| = " +
                        std::to_string(err) + ")");
  }
}

Posteriorgram pool_phoneme(const JointTensor& t) {
  Posteriorgram out;
  out.frames = t.frames;
  out.classes = t.n_phone;
  out.kind = GramKind::phoneme;
  out.clock = t.clock;
  out.data.resize(t.frames * t.n_phone);
  std::vector<double> means(t.n_phone);
  for (std::size_t f = 0; f < t.frames; ++f) {
    for (std::size_t p = 0; p < t.n_phone; ++p) {
      double s = 0.0;
      for (std::size_t k = 0; k < t.n_pitch; ++k) s += t.at(f, p, k);
      means[p] = s / static_cast<double>(t.n_pitch);
    }
    const double lse = logsumexp(means);
    for (std::size_t p = 0; p < t.n_phone; ++p) out.at(f, p) = means[p] - lse;
  }
  return out;
}

Posteriorgram pool_pitch(const JointTensor& t) {
  Posteriorgram out;
  out.frames = t.frames;
  out.classes = t.n_pitch;
  out.kind = GramKind::pitch;
  out.clock = t.clock;
  out.data.resize(t.frames * t.n_pitch);
  std::vector<double> means(t.n_pitch);
  for (std::size_t f = 0; f < t.frames; ++f) {
    for (std::size_t k = 0; k < t.n_pitch; ++k) {
      double s = 0.0;
      for (std::size_t p = 0; p < t.n_phone; ++p) s += t.at(f, p, k);
      means[k] = s / static_cast<double>(t.n_phone);
    }
    const double lse = logsumexp(means);
    for (std::size_t k = 0; k < t.n_pitch; ++k) out.at(f, k) = means[k] - lse;
  }
  return out;
}

Gram read_gram(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  const std::string name = path.filename().string();
  const auto first = bytes.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (bytes[first] == '{' || bytes[first] == '['))
    return decode_json(bytes, name);
  return decode_pgrm(bytes, name);
}

void write_gram(const JointTensor& t, const std::filesystem::path& path) {
  validate(t);
  if (path.extension() == ".json") {
    nlohmann::json j = {
        {"dims", {t.frames, t.n_phone, t.n_pitch}},
        {"kind", gram_kind_name(GramKind::joint)},
        {"clock", clock_to_json(t.clock)},
        {"data", t.data},
    };
    write_file(path, j.dump());
    return;
  }
  const std::vector<std::uint32_t> dims = {static_cast<std::uint32_t>(t.frames),
                                           static_cast<std::uint32_t>(t.n_phone),
                                           static_cast<std::uint32_t>(t.n_pitch)};
  write_file(path, encode_pgrm(GramKind::joint, dims, t.clock, t.data));
}

void write_gram(const Posteriorgram& p, const std::filesystem::path& path) {
  if (p.kind == GramKind::joint)
    throw FormatError("posteriorgram cannot have kind 'joint'");
  if (path.extension() == ".json") {
    nlohmann::json j = {
        {"dims", {p.frames, p.classes}},
        {"kind", gram_kind_name(p.kind)},
        {"clock", clock_to_json(p.clock)},
        {"data", p.data},
    };
    write_file(path, j.dump());
    return;
  }
  const std::vector<std::uint32_t> dims = {static_cast<std::uint32_t>(p.frames),
                                           static_cast<std::uint32_t>(p.classes)};
  write_file(path, encode_pgrm(p.kind, dims, p.clock, p.data));
}

JointTensor read_joint(const std::filesystem::path& path) {
  Gram g = read_gram(path);
  if (auto* t = std::get_if<JointTensor>(&g)) return std::move(*t);
  throw FormatError(path.filename().string() + ": expected a rank-3 joint tensor");
}

Posteriorgram read_posteriorgram(const std::filesystem::path& path) {
  Gram g = read_gram(path);
  if (auto* p = std::get_if<Posteriorgram>(&g)) return std::move(*p);
  throw FormatError(path.filename().string() + ": expected a rank-2 posteriorgram");
}

}  // namespace lyra
