// lyralign: batch frontend for the alignment, loss, synthesis and
// evaluation pipelines. Every report embeds the resolved configuration and
// the tool version; errors print a machine-readable JSON object on stderr.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lyra/align.hpp"
#include "lyra/config.hpp"
#include "lyra/gram.hpp"
#include "lyra/jsonio.hpp"
#include "lyra/lexicon.hpp"
#include "lyra/loss.hpp"
#include "lyra/metrics.hpp"
#include "lyra/notes.hpp"
#include "lyra/synth.hpp"
#include "lyra/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigFlags {
  std::string config_path;
  std::optional<double> lambda, alpha, pco_tol, bdr_window, gaussian_width,
      onset_tol, offset_ratio, offset_min, pitch_tol_cents, sample_rate, hop,
      decimation, note_min_dur, merge_gap, binarize_at;
  std::optional<int> n_pitch, jobs;
  std::optional<std::string> bdr_mode;
  std::optional<bool> octave_wrap, insert_spaces, line_break_space;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f, bool clock_flags = true) {
  cmd->add_option("--config", f.config_path, "key = value config file");
  cmd->add_option("--lambda", f.lambda, "pitch loss weight");
  cmd->add_option("--alpha", f.alpha, "boundary bonus weight");
  cmd->add_option("--bdr-mode", f.bdr_mode, "boundary bonus mode: entry|occupancy");
  cmd->add_option("--pco-tol", f.pco_tol, "onset tolerance for PCO, seconds");
  cmd->add_option("--bdr-window", f.bdr_window, "boundary hit window, seconds");
  cmd->add_option("--gaussian-width", f.gaussian_width, "boundary target width, seconds");
  cmd->add_option("--onset-tol", f.onset_tol, "note onset tolerance, seconds");
  cmd->add_option("--offset-ratio", f.offset_ratio, "note offset tolerance ratio");
  cmd->add_option("--offset-min", f.offset_min, "note offset tolerance floor, seconds");
  cmd->add_option("--pitch-tol-cents", f.pitch_tol_cents, "note pitch tolerance, cents");
  cmd->add_flag("--octave-wrap,!--no-octave-wrap", f.octave_wrap,
                "wrap pitch errors at the octave");
  cmd->add_option("--n-pitch", f.n_pitch, "pitch classes incl. silence: 47|48");
  if (clock_flags) {
    cmd->add_option("--sample-rate", f.sample_rate, "clock sample rate, Hz");
    cmd->add_option("--hop", f.hop, "clock hop, samples");
    cmd->add_option("--decimation", f.decimation, "model frames per input frame");
  }
  cmd->add_flag("--insert-spaces,!--no-insert-spaces", f.insert_spaces,
                "space token between words");
  cmd->add_flag("--line-break-space,!--no-line-break-space", f.line_break_space,
                "space token across line breaks too");
  cmd->add_option("--note-min-dur", f.note_min_dur, "shortest decoded note, seconds");
  cmd->add_option("--merge-gap", f.merge_gap, "join same-pitch notes closer than this");
  cmd->add_option("--binarize-at", f.binarize_at, "AUC target threshold");
  cmd->add_option("--jobs", f.jobs, "parallel workers for batch inputs");
}

lyra::RunConfig resolve_config(const ConfigFlags& f) {
  lyra::RunConfig cfg;
  if (!f.config_path.empty()) cfg.apply_file(f.config_path);
  if (f.lambda) cfg.lambda = *f.lambda;
  if (f.alpha) cfg.alpha = *f.alpha;
  if (f.bdr_mode) cfg.bdr_mode = *f.bdr_mode;
  if (f.pco_tol) cfg.pco_tol = *f.pco_tol;
  if (f.bdr_window) cfg.bdr_window = *f.bdr_window;
  if (f.gaussian_width) cfg.gaussian_width = *f.gaussian_width;
  if (f.onset_tol) cfg.onset_tol = *f.onset_tol;
  if (f.offset_ratio) cfg.offset_ratio = *f.offset_ratio;
  if (f.offset_min) cfg.offset_min = *f.offset_min;
  if (f.pitch_tol_cents) cfg.pitch_tol_cents = *f.pitch_tol_cents;
  if (f.octave_wrap) cfg.octave_wrap = *f.octave_wrap;
  if (f.n_pitch) cfg.n_pitch = *f.n_pitch;
  if (f.sample_rate) cfg.sample_rate = *f.sample_rate;
  if (f.hop) cfg.hop = *f.hop;
  if (f.decimation) cfg.decimation = *f.decimation;
  if (f.insert_spaces) cfg.insert_spaces = *f.insert_spaces;
  if (f.line_break_space) cfg.line_break_space = *f.line_break_space;
  if (f.note_min_dur) cfg.note_min_dur = *f.note_min_dur;
  if (f.merge_gap) cfg.merge_gap = *f.merge_gap;
  if (f.binarize_at) cfg.binarize_at = *f.binarize_at;
  if (f.jobs) cfg.jobs = *f.jobs;
  cfg.validate();
  return cfg;
}

json base_report(const char* schema, const lyra::RunConfig& cfg) {
  return json{{"schema", schema}, {"version", lyra::kVersion}, {"config", cfg.echo()}};
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << lyra::dump_json(j);
    return;
  }
  lyra::save_json(j, out_path);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw lyra::FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

lyra::Posteriorgram load_phoneme_gram(const fs::path& path) {
  lyra::Gram g = lyra::read_gram(path);
  if (auto* t = std::get_if<lyra::JointTensor>(&g)) return lyra::pool_phoneme(*t);
  auto p = std::get<lyra::Posteriorgram>(std::move(g));
  if (p.kind != lyra::GramKind::phoneme)
    throw lyra::FormatError(path.filename().string() +
                            ": expected a phoneme (or joint) gram");
  lyra::validate(p);
  return p;
}

lyra::Posteriorgram load_pitch_gram(const fs::path& path) {
  lyra::Gram g = lyra::read_gram(path);
  if (auto* t = std::get_if<lyra::JointTensor>(&g)) return lyra::pool_pitch(*t);
  auto p = std::get<lyra::Posteriorgram>(std::move(g));
  if (p.kind != lyra::GramKind::pitch)
    throw lyra::FormatError(path.filename().string() +
                            ": expected a pitch (or joint) gram");
  lyra::validate(p);
  return p;
}

lyra::Posteriorgram load_boundary_gram(const fs::path& path) {
  auto p = lyra::read_posteriorgram(path);
  if (p.kind != lyra::GramKind::boundary || p.classes != 1)
    throw lyra::FormatError(path.filename().string() + ": expected a boundary gram");
  lyra::validate(p);
  return p;
}

lyra::BoundaryCurve curve_from_gram(const lyra::Posteriorgram& p) {
  lyra::BoundaryCurve c;
  c.clock = p.clock;
  c.values.reserve(p.frames);
  for (double v : p.data) c.values.push_back(std::exp(v));
  return c;
}

// Batch inputs: a single file pairs with a single file; a directory pairs
// every *.json inside with the same filename on the reference side.
struct EvalPair {
  std::string name;
  fs::path est, ref;
};

std::vector<EvalPair> collect_pairs(const fs::path& est, const fs::path& ref) {
  std::vector<EvalPair> pairs;
  if (fs::is_directory(est)) {
    if (!fs::is_directory(ref))
      throw lyra::ConfigError("estimate is a directory but reference is not");
    for (const auto& entry : fs::directory_iterator(est)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
      pairs.push_back({entry.path().filename().string(), entry.path(),
                       ref / entry.path().filename()});
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const EvalPair& a, const EvalPair& b) { return a.name < b.name; });
    if (pairs.empty()) throw lyra::EmptyInput("no .json files in " + est.string());
    for (const auto& p : pairs)
      if (!fs::exists(p.ref))
        throw lyra::FormatError("reference file missing for " + p.name);
  } else {
    pairs.push_back({est.filename().string(), est, ref});
  }
  return pairs;
}

void run_parallel(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  const auto count = static_cast<std::size_t>(std::min<int>(jobs, static_cast<int>(n)));
  threads.reserve(count);
  for (std::size_t i = 0; i < count; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

// ---------------------------------------------------------------- align ---

struct AlignArgs {
  std::string lyrics, dict, plan, phoneme, boundary, out, lrc;
  ConfigFlags flags;
};

int cmd_align(const AlignArgs& args) {
  const lyra::RunConfig cfg = resolve_config(args.flags);
  if (args.plan.empty() == args.lyrics.empty())
    throw lyra::ConfigError("pass exactly one of --lyrics (with --dict) or --plan");

  lyra::Posteriorgram phoneme = load_phoneme_gram(args.phoneme);

  lyra::PhonemePlan plan;
  std::vector<std::string> word_texts;
  std::vector<std::string> line_texts;
  std::vector<std::string> oov_words;
  if (!args.lyrics.empty()) {
    if (args.dict.empty())
      throw lyra::ConfigError("--lyrics needs --dict for the pronunciations");
    const lyra::PhonemeSet set = lyra::PhonemeSet::cmu();
    const lyra::PronouncingDict dict = lyra::PronouncingDict::load(args.dict, set);
    lyra::LyricsDoc doc = lyra::parse_lyrics(read_text_file(args.lyrics));
    lyra::phonemize(doc, dict);
    plan = lyra::build_plan(doc, set, {cfg.insert_spaces, cfg.line_break_space});
    oov_words = doc.oov_words;
    for (const auto& line : doc.lines) {
      std::string text;
      for (const auto& w : line) {
        word_texts.push_back(w.text);
        if (!text.empty()) text += ' ';
        text += w.text;
      }
      line_texts.push_back(std::move(text));
    }
  } else {
    plan = lyra::plan_from_json(lyra::load_json(args.plan));
    if (!args.lrc.empty())
      throw lyra::ConfigError("--lrc needs --lyrics; a bare plan has no line text");
  }

  lyra::AlignmentPath path;
  if (!args.boundary.empty()) {
    const lyra::Posteriorgram bdr = load_boundary_gram(args.boundary);
    path = lyra::viterbi_bdr(phoneme, bdr, plan, cfg.bdr_config());
  } else {
    if (cfg.alpha > 0.0)
      throw lyra::ConfigError(
          "alpha > 0 needs a boundary gram; pass --boundary or set --alpha 0");
    path = lyra::viterbi(phoneme, plan);
  }

  const lyra::Spans spans = lyra::path_to_spans(path, plan, phoneme.clock);

  json report = base_report("lyralign/alignment@1", cfg);
  report.update(lyra::spans_to_json(spans, word_texts));
  report["score"] = path.score;
  std::vector<double> events;
  for (const auto& l : spans.lines) events.push_back(l.onset);
  report["events"] = events;
  if (!args.lyrics.empty()) report["oov_words"] = oov_words;
  emit(report, args.out);

  if (!args.lrc.empty()) {
    std::ofstream out(args.lrc, std::ios::trunc);
    if (!out) throw lyra::FormatError("cannot write " + args.lrc);
    out << lyra::to_lrc(spans.lines, line_texts);
  }
  return 0;
}

// ----------------------------------------------------------------- loss ---

struct LossArgs {
  std::string phoneme, plan, pitch, pitch_targets, out;
  ConfigFlags flags;
};

int cmd_loss(const LossArgs& args) {
  const lyra::RunConfig cfg = resolve_config(args.flags);
  const lyra::Posteriorgram phoneme = load_phoneme_gram(args.phoneme);
  const lyra::PhonemePlan plan = lyra::plan_from_json(lyra::load_json(args.plan));
  if (args.pitch.empty() != args.pitch_targets.empty())
    throw lyra::ConfigError("--pitch and --pitch-targets go together");

  const double phone_loss = lyra::ctc_loss(phoneme, plan).loss;
  double pitch_loss = 0.0;
  if (!args.pitch.empty()) {
    const lyra::Posteriorgram pitch = load_pitch_gram(args.pitch);
    const json tj = lyra::load_json(args.pitch_targets);
    if (!tj.contains("targets"))
      throw lyra::FormatError(args.pitch_targets + ": missing 'targets'");
    const auto targets = tj.at("targets").get<std::vector<int>>();
    std::vector<std::uint8_t> mask;
    if (tj.contains("mask")) mask = tj.at("mask").get<std::vector<std::uint8_t>>();
    pitch_loss = lyra::pitch_ce(pitch, targets, mask);
  }
  const lyra::LossReport report = lyra::total_loss(phone_loss, pitch_loss, cfg.lambda);

  json out = base_report("lyralign/loss@1", cfg);
  out["phone_loss"] = report.phone_loss;
  out["pitch_loss"] = report.pitch_loss;
  out["lambda"] = report.lambda;
  out["total"] = report.total;
  emit(out, args.out);
  return 0;
}

// ---------------------------------------------------------------- synth ---

struct SynthArgs {
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t frames = 200;
  double noise = 0.0;
  double margin = 4.0;
  int blur = 0;
  int lines = 2;
  int max_words = 3;
  int max_phones = 3;
  ConfigFlags flags;
};

int cmd_synth(const SynthArgs& args) {
  const lyra::RunConfig cfg = resolve_config(args.flags);
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);

  const lyra::PhonemeSet set = lyra::PhonemeSet::cmu();
  std::mt19937_64 rng(args.seed);
  const lyra::LyricsDoc doc =
      lyra::random_doc(rng, set, args.lines, args.max_words, args.max_phones);

  lyra::SynthSpec spec;
  spec.seed = rng();  // decouple the tensor stream from the doc stream
  spec.frames = args.frames;
  spec.plan = lyra::build_plan(doc, set, {cfg.insert_spaces, cfg.line_break_space});
  spec.noise = args.noise;
  spec.blur = args.blur;
  spec.clock = cfg.clock();
  spec.layout = cfg.pitch_layout();
  spec.margin = args.margin;
  const lyra::SynthCase sc = lyra::synth_case(spec);

  lyra::write_gram(sc.joint, dir / "joint.pgrm");
  lyra::write_gram(lyra::pool_phoneme(sc.joint), dir / "phoneme.pgrm");
  lyra::write_gram(lyra::pool_pitch(sc.joint), dir / "pitch.pgrm");

  lyra::Posteriorgram bdr;
  bdr.frames = sc.boundary.frames();
  bdr.classes = 1;
  bdr.kind = lyra::GramKind::boundary;
  bdr.clock = sc.boundary.clock;
  for (double v : sc.boundary.values)
    bdr.data.push_back(std::log(std::clamp(v, 1e-6, 1.0)));
  lyra::write_gram(bdr, dir / "boundary.pgrm");

  lyra::save_json(lyra::plan_to_json(spec.plan), dir / "plan.json");

  std::vector<std::string> word_texts;
  std::string lyrics_text;
  for (const auto& line : doc.lines) {
    for (const auto& w : line) {
      word_texts.push_back(w.text);
      lyrics_text += w.text;
      lyrics_text += ' ';
    }
    if (!lyrics_text.empty()) lyrics_text.back() = '\n';
  }
  std::ofstream(dir / "lyrics.txt", std::ios::trunc) << lyrics_text;

  json truth = base_report("lyralign/truth@1", cfg);
  truth["seed"] = args.seed;
  truth["frames"] = args.frames;
  truth["noise"] = args.noise;
  truth.update(
      lyra::spans_to_json({sc.true_word_spans, sc.true_line_spans}, word_texts));
  truth["notes"] = lyra::notes_to_json(sc.true_notes);
  truth["events"] = sc.line_onsets;
  truth["path"] = sc.true_path.states;
  lyra::save_json(truth, dir / "truth.json");
  return 0;
}

// ----------------------------------------------------------------- eval ---

struct EvalArgs {
  std::string est, ref, out, level = "word";
  std::string est_curve, ref_curve;  // boundary only
  ConfigFlags flags;
};

std::vector<double> onsets_for_level(const lyra::Spans& spans, lyra::EvalLevel level,
                                     const std::string& name) {
  std::vector<double> onsets;
  if (level == lyra::EvalLevel::word) {
    for (const auto& w : spans.words) onsets.push_back(w.onset);
  } else {
    for (const auto& l : spans.lines) onsets.push_back(l.onset);
  }
  if (onsets.empty()) throw lyra::EmptyInput(name + ": no onsets at this level");
  return onsets;
}

int cmd_eval_lyrics(const EvalArgs& args) {
  const lyra::RunConfig cfg = resolve_config(args.flags);
  const lyra::EvalLevel level = lyra::eval_level_from_name(args.level);
  const auto pairs = collect_pairs(args.est, args.ref);

  std::vector<json> rows(pairs.size());
  std::vector<double> aaes(pairs.size()), pcos(pairs.size());
  run_parallel(pairs.size(), cfg.jobs, [&](std::size_t i) {
    const auto est = onsets_for_level(lyra::spans_from_json(lyra::load_json(pairs[i].est)),
                                      level, pairs[i].est.string());
    const auto ref = onsets_for_level(lyra::spans_from_json(lyra::load_json(pairs[i].ref)),
                                      level, pairs[i].ref.string());
    const lyra::AlignEval ev = lyra::eval_alignment(est, ref, cfg.pco_tol, level);
    rows[i] = {{"file", pairs[i].name}, {"aae", ev.aae}, {"pco", ev.pco}, {"n", est.size()}};
    aaes[i] = ev.aae;
    pcos[i] = ev.pco;
  });

  json report = base_report("lyralign/eval-lyrics@1", cfg);
  report["level"] = lyra::eval_level_name(level);
  report["rows"] = rows;
  report["corpus"] = {{"aae", mean_of(aaes)}, {"pco", mean_of(pcos)}, {"songs", rows.size()}};
  emit(report, args.out);
  return 0;
}

int cmd_eval_notes(const EvalArgs& args) {
  const lyra::RunConfig cfg = resolve_config(args.flags);
  const auto pairs = collect_pairs(args.est, args.ref);

  std::vector<json> rows(pairs.size());
  std::vector<double> con(pairs.size()), conp(pairs.size()), conpoff(pairs.size());
  run_parallel(pairs.size(), cfg.jobs, [&](std::size_t i) {
    const auto est = lyra::notes_from_json(lyra::load_json(pairs[i].est));
    const auto ref = lyra::notes_from_json(lyra::load_json(pairs[i].ref));
    const lyra::NoteEval ev = lyra::eval_notes(est, ref, cfg.note_match());
    rows[i] = {{"file", pairs[i].name},  {"con", ev.con},       {"conp", ev.conp},
               {"conpoff", ev.conpoff},  {"n_est", est.size()}, {"n_ref", ref.size()}};
    con[i] = ev.con;
    conp[i] = ev.conp;
    conpoff[i] = ev.conpoff;
  });

  json report = base_report("lyralign/eval-notes@1", cfg);
  report["rows"] = rows;
  report["corpus"] = {{"con", mean_of(con)},
                      {"conp", mean_of(conp)},
                      {"conpoff", mean_of(conpoff)},
                      {"songs", rows.size()}};
  emit(report, args.out);
  return 0;
}

int cmd_eval_boundary(const EvalArgs& args) {
  const lyra::RunConfig cfg = resolve_config(args.flags);
  const auto pairs = collect_pairs(args.est, args.ref);
  if ((!args.est_curve.empty() || !args.ref_curve.empty()) &&
      (args.est_curve.empty() || args.ref_curve.empty()))
    throw lyra::ConfigError("--est-curve and --ref-curve go together");

  std::vector<json> rows(pairs.size());
  std::vector<double> ps(pairs.size()), rs(pairs.size()), fscores(pairs.size());
  run_parallel(pairs.size(), cfg.jobs, [&](std::size_t i) {
    auto est = lyra::events_from_json(lyra::load_json(pairs[i].est));
    auto ref = lyra::events_from_json(lyra::load_json(pairs[i].ref));
    std::sort(est.begin(), est.end());
    std::sort(ref.begin(), ref.end());
    const lyra::BoundaryPRF ev = lyra::eval_boundary(est, ref, cfg.bdr_window);
    rows[i] = {{"file", pairs[i].name}, {"precision", ev.precision},
               {"recall", ev.recall},   {"f_score", ev.f_score},
               {"hits", ev.hits},       {"n_est", est.size()},
               {"n_ref", ref.size()},   {"degenerate", ev.degenerate}};
    ps[i] = ev.precision;
    rs[i] = ev.recall;
    fscores[i] = ev.f_score;
  });

  json report = base_report("lyralign/eval-boundary@1", cfg);
  report["rows"] = rows;
  report["corpus"] = {{"precision", mean_of(ps)},
                      {"recall", mean_of(rs)},
                      {"f_score", mean_of(fscores)},
                      {"songs", rows.size()}};
  if (!args.est_curve.empty()) {
    const auto pred = curve_from_gram(load_boundary_gram(args.est_curve));
    const auto target = curve_from_gram(load_boundary_gram(args.ref_curve));
    report["auc"] = lyra::eval_auc(pred, target, cfg.binarize_at);
  }
  emit(report, args.out);
  return 0;
}

// --------------------------------------------------------------- window ---

struct WindowArgs {
  std::string words, out;
  double window = 5.6;
  double hop = 2.8;
  ConfigFlags flags;
};

int cmd_window(const WindowArgs& args) {
  const lyra::RunConfig cfg = resolve_config(args.flags);
  const auto words = lyra::timed_words_from_json(lyra::load_json(args.words));
  const auto samples = lyra::window_samples(words, args.window, args.hop);

  json report = base_report("lyralign/windows@1", cfg);
  report["window"] = args.window;
  report["hop"] = args.hop;
  json rows = json::array();
  for (const auto& s : samples)
    rows.push_back({{"start", s.start}, {"covered", s.covered}});
  report["windows"] = rows;
  emit(report, args.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lyrics-to-audio alignment toolkit"};
  app.set_version_flag("--version", lyra::kVersion);
  app.require_subcommand(1);

  AlignArgs align_args;
  auto* align_cmd = app.add_subcommand("align", "align lyrics to a phoneme posteriorgram");
  align_cmd->add_option("--lyrics", align_args.lyrics, "UTF-8 lyrics, one line per line");
  align_cmd->add_option("--dict", align_args.dict, "pronouncing dictionary file");
  align_cmd->add_option("--plan", align_args.plan,
                        "prebuilt plan JSON (alternative to --lyrics)");
  align_cmd->add_option("--phoneme", align_args.phoneme, "phoneme or joint gram file")
      ->required();
  align_cmd->add_option("--boundary", align_args.boundary, "boundary gram file");
  align_cmd->add_option("--out", align_args.out, "output JSON (default stdout)");
  align_cmd->add_option("--lrc", align_args.lrc, "also write line-level LRC here");
  add_config_flags(align_cmd, align_args.flags);

  LossArgs loss_args;
  auto* loss_cmd = app.add_subcommand("loss", "reference losses for one clip");
  loss_cmd->add_option("--phoneme", loss_args.phoneme, "phoneme or joint gram file")
      ->required();
  loss_cmd->add_option("--plan", loss_args.plan, "plan JSON")->required();
  loss_cmd->add_option("--pitch", loss_args.pitch, "pitch or joint gram file");
  loss_cmd->add_option("--pitch-targets", loss_args.pitch_targets,
                       "JSON with per-frame 'targets' and optional 'mask'");
  loss_cmd->add_option("--out", loss_args.out, "output JSON (default stdout)");
  add_config_flags(loss_cmd, loss_args.flags);

  SynthArgs synth_args;
  auto* synth_cmd =
      app.add_subcommand("synth", "write a synthetic fixture directory with known truth");
  synth_cmd->add_option("--out", synth_args.out_dir, "fixture directory")->required();
  synth_cmd->add_option("--seed", synth_args.seed, "random seed");
  synth_cmd->add_option("--frames", synth_args.frames, "posteriorgram length");
  synth_cmd->add_option("--noise", synth_args.noise, "logit noise scale");
  synth_cmd->add_option("--margin", synth_args.margin, "true-class logit margin");
  synth_cmd->add_option("--blur", synth_args.blur, "temporal smear half-width, frames");
  synth_cmd->add_option("--lines", synth_args.lines, "lyric lines to generate");
  synth_cmd->add_option("--max-words", synth_args.max_words, "words per line, at most");
  synth_cmd->add_option("--max-phones", synth_args.max_phones, "phonemes per word, at most");
  add_config_flags(synth_cmd, synth_args.flags);

  EvalArgs lyr_args, note_args, bdr_args;
  auto* eval_lyr = app.add_subcommand("eval-lyrics", "AAE / PCO against a reference");
  eval_lyr->add_option("--est", lyr_args.est, "alignment JSON or directory")->required();
  eval_lyr->add_option("--ref", lyr_args.ref, "reference JSON or directory")->required();
  eval_lyr->add_option("--level", lyr_args.level, "word or line");
  eval_lyr->add_option("--out", lyr_args.out, "output JSON (default stdout)");
  add_config_flags(eval_lyr, lyr_args.flags);

  auto* eval_notes = app.add_subcommand("eval-notes", "COn / COnP / COnPOff F-scores");
  eval_notes->add_option("--est", note_args.est, "notes JSON or directory")->required();
  eval_notes->add_option("--ref", note_args.ref, "reference JSON or directory")->required();
  eval_notes->add_option("--out", note_args.out, "output JSON (default stdout)");
  add_config_flags(eval_notes, note_args.flags);

  auto* eval_bdr =
      app.add_subcommand("eval-boundary", "boundary precision / recall / F (+AUC)");
  eval_bdr->add_option("--est", bdr_args.est, "events JSON or directory")->required();
  eval_bdr->add_option("--ref", bdr_args.ref, "reference JSON or directory")->required();
  eval_bdr->add_option("--est-curve", bdr_args.est_curve, "boundary gram for AUC");
  eval_bdr->add_option("--ref-curve", bdr_args.ref_curve, "target boundary gram for AUC");
  eval_bdr->add_option("--out", bdr_args.out, "output JSON (default stdout)");
  add_config_flags(eval_bdr, bdr_args.flags);

  WindowArgs window_args;
  auto* window_cmd = app.add_subcommand("window", "sliding-window coverage of timed words");
  window_cmd->add_option("--words", window_args.words, "timed words JSON")->required();
  window_cmd->add_option("--window", window_args.window, "window length, seconds");
  window_cmd->add_option("--hop", window_args.hop, "hop size, seconds");
  window_cmd->add_option("--out", window_args.out, "output JSON (default stdout)");
  add_config_flags(window_cmd, window_args.flags, /*clock_flags=*/false);

  try {
    app.parse(argc, argv);
    if (align_cmd->parsed()) return cmd_align(align_args);
    if (loss_cmd->parsed()) return cmd_loss(loss_args);
    if (synth_cmd->parsed()) return cmd_synth(synth_args);
    if (eval_lyr->parsed()) return cmd_eval_lyrics(lyr_args);
    if (eval_notes->parsed()) return cmd_eval_notes(note_args);
    if (eval_bdr->parsed()) return cmd_eval_boundary(bdr_args);
    if (window_cmd->parsed()) return cmd_window(window_args);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", {{"code", "UsageError"}, {"message", e.what()}}}}.dump()
              << "\n";
    return 2;
  } catch (const lyra::Error& e) {
    std::cerr << json{{"error", {{"code", e.code()}, {"message", e.what()}}}}.dump()
              << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"code", "InternalError"}, {"message", e.what()}}}}.dump()
              << "\n";
    return 1;
  }
}
