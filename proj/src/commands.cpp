#include "roadseg/commands.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "roadseg/dataset.hpp"
#include "roadseg/error.hpp"
#include "roadseg/model_io.hpp"
#include "roadseg/random.hpp"
#include "roadseg/sampler.hpp"
#include "roadseg/synthdata.hpp"

namespace roadseg {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(Errc::InvalidConfig,
                "bad value '" + std::string(text) + "' for key '" + std::string(key) + "'");
  }
  return value;
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

template <typename T, typename Field>
Setter number(Field field) {
  return [field](RunConfig& c, std::string_view key, std::string_view value) {
    field(c) = parse_value<T>(key, value);
  };
}

Setter path(std::filesystem::path RunConfig::*member) {
  return [member](RunConfig& c, std::string_view, std::string_view value) {
    c.*member = std::filesystem::path(std::string(value));
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table{
      {"roi_size", number<int>([](RunConfig& c) -> int& { return c.cascade.roi_size; })},
      {"samples_per_class",
       number<int>([](RunConfig& c) -> int& { return c.cascade.samples_per_class_per_frame; })},
      {"target_cascade_fpr",
       number<double>([](RunConfig& c) -> double& { return c.cascade.target_cascade_fpr; })},
      {"max_stages", number<int>([](RunConfig& c) -> int& { return c.cascade.max_stages; })},
      {"max_trees", number<int>([](RunConfig& c) -> int& { return c.cascade.stage.max_trees; })},
      {"target_stage_dr",
       number<double>([](RunConfig& c) -> double& { return c.cascade.stage.target_stage_dr; })},
      {"target_stage_fpr",
       number<double>([](RunConfig& c) -> double& { return c.cascade.stage.target_stage_fpr; })},
      {"eps_min", number<double>([](RunConfig& c) -> double& { return c.cascade.stage.eps_min; })},
      {"mining_stride", number<int>([](RunConfig& c) -> int& { return c.cascade.mining_stride; })},
      {"seed", number<std::uint64_t>([](RunConfig& c) -> std::uint64_t& { return c.cascade.seed; })},
      {"n_train", number<std::size_t>([](RunConfig& c) -> std::size_t& { return c.n_train; })},
      {"split_seed", number<std::uint64_t>([](RunConfig& c) -> std::uint64_t& { return c.split_seed; })},
      {"eval_samples_per_class",
       number<int>([](RunConfig& c) -> int& { return c.eval_samples_per_class; })},
      {"eval_seed", number<std::uint64_t>([](RunConfig& c) -> std::uint64_t& { return c.eval_seed; })},
      {"max_fpr", number<double>([](RunConfig& c) -> double& { return c.max_fpr; })},
      {"synth_frames", number<std::size_t>([](RunConfig& c) -> std::size_t& { return c.synth_frames; })},
      {"synth_seed", number<std::uint64_t>([](RunConfig& c) -> std::uint64_t& { return c.synth_seed; })},
      {"stride", number<int>([](RunConfig& c) -> int& { return c.stride; })},
      {"data", path(&RunConfig::data)},
      {"model", path(&RunConfig::model)},
      {"report", path(&RunConfig::report)},
      {"roc", path(&RunConfig::roc)},
      {"summary", path(&RunConfig::summary)},
      {"image", path(&RunConfig::image)},
      {"out", path(&RunConfig::out)},
  };
  return table;
}

std::string real(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string fixed6(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 6);
  return std::string(buf.data(), res.ptr);
}

void require(const std::filesystem::path& p, std::string_view flag) {
  if (p.empty()) throw UsageError("missing required option --" + std::string(flag));
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot create " + p.string());
  out << text;
  if (!out) throw Error(Errc::Io, "write failed for " + p.string());
}

struct SplitFrames {
  std::vector<AnnotatedFrame> train;
  std::vector<AnnotatedFrame> test;
};

SplitFrames load_split(const RunConfig& config) {
  auto frames = load_dataset(config.data);
  const std::size_t n_train = resolve_n_train(config, frames.size());
  const FrameSplit split = split_frames(frames.size(), {config.split_seed, n_train});
  SplitFrames out;
  for (const std::size_t i : split.train) out.train.push_back(frames[i]);
  for (const std::size_t i : split.test) out.test.push_back(frames[i]);
  return out;
}

}  // namespace

RunConfig parse_run_config(std::string_view text, RunConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw Error(Errc::InvalidConfig,
                  "line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
    it->second(base, key, value);
  }
  return base;
}

RunConfig load_run_config(const std::filesystem::path& p, RunConfig base) {
  std::ifstream in(p);
  if (!in) throw Error(Errc::Io, "cannot open config " + p.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), std::move(base));
}

std::size_t resolve_n_train(const RunConfig& config, std::size_t total) {
  return config.n_train > 0 ? config.n_train : total * 3 / 5;
}

void cmd_synth(const RunConfig& config, std::ostream& log) {
  require(config.out, "out");
  generate_corpus(config.synth_frames, config.synth_seed, config.out);
  log << "wrote " << config.synth_frames << " frames and " << kAnnotationFile << " to "
      << config.out.string() << "\n";
}

std::string format_training_report(const CascadeTrainingResult& result, double wall_seconds) {
  std::ostringstream out;
  out << "stages " << result.model.stages.size() << "\n";
  out << "stop " << cascade_stop_name(result.stop) << "\n";
  for (std::size_t i = 0; i < result.stages.size(); ++i) {
    const StageReport& s = result.stages[i];
    out << "stage " << i + 1 << " trees=" << s.trees << " stop=" << stage_stop_name(s.stop)
        << " positives=" << s.positives << " negatives=" << s.negatives
        << " off_road=" << s.negative_pool.off_road
        << " mixed_boundary=" << s.negative_pool.mixed_boundary
        << " car_overlap=" << s.negative_pool.car_overlap << " mined=" << s.mined_negatives
        << " DR_i=" << real(s.detection_rate) << " FPR_i=" << real(s.false_positive_rate)
        << " train_error_at_0=" << real(s.zero_threshold_error)
        << " adaboost_bound=" << real(s.error_bound) << "\n";
  }
  out << "DR_t " << real(result.detection_rate) << "\n";
  out << "FPR_t " << real(result.false_positive_rate) << "\n";
  out << "wall_time_s " << fixed6(wall_seconds) << "\n";
  return out.str();
}

TrainOutcome cmd_train(const RunConfig& config, std::ostream& log) {
  require(config.data, "data");
  require(config.model, "model");
  const auto start = std::chrono::steady_clock::now();
  const SplitFrames split = load_split(config);
  log << "training on " << split.train.size() << " frames (" << split.test.size() << " held out)\n";

  TrainOutcome outcome;
  outcome.result = train_cascade(split.train, config.cascade);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  outcome.report = format_training_report(outcome.result, seconds);

  save_cascade(config.model, outcome.result.model);
  if (!config.report.empty()) write_text(config.report, outcome.report);
  log << outcome.report;
  return outcome;
}

EvalOutcome cmd_eval(const RunConfig& config, std::ostream& log) {
  require(config.data, "data");
  require(config.model, "model");
  const CascadeModel model = load_cascade(config.model);
  const SplitFrames split = load_split(config);

  std::vector<LabeledSample> samples;
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    const AnnotatedFrame& frame = split.test[i];
    if (frame.image.width() < model.roi_w || frame.image.height() < model.roi_h) {
      throw Error(Errc::DimensionMismatch, "frame " + frame.annotation.frame_id +
                                               " is smaller than the model ROI");
    }
    if (frame.annotation.road() == nullptr) continue;
    Rng rng(derive_seed(config.eval_seed, frame.annotation.frame_id));
    auto drawn = sample_random_rois(frame.annotation, frame.image, config.eval_samples_per_class,
                                    model.roi_w, rng, i);
    std::move(drawn.begin(), drawn.end(), std::back_inserter(samples));
  }
  if (samples.empty()) throw Error(Errc::EmptySamples, "no held-out frames with a road polygon");

  EvalOutcome outcome;
  outcome.roc = roc_sweep(model, samples);
  outcome.counts = confusion(model, samples);
  outcome.operating_point = best_operating_point(outcome.roc, config.max_fpr);

  std::ostringstream summary;
  summary << "test_frames " << split.test.size() << "\n";
  summary << "samples positives=" << outcome.counts.positives()
          << " negatives=" << outcome.counts.negatives() << "\n";
  summary << "confusion tp=" << outcome.counts.tp << " fp=" << outcome.counts.fp
          << " tn=" << outcome.counts.tn << " fn=" << outcome.counts.fn << "\n";
  summary << "cascade DR=" << fixed6(outcome.counts.detection_rate())
          << " FPR=" << fixed6(outcome.counts.false_positive_rate()) << "\n";
  if (outcome.operating_point) {
    summary << "operating_point max_fpr=" << fixed6(config.max_fpr)
            << " threshold=" << real(outcome.operating_point->threshold)
            << " DR=" << fixed6(outcome.operating_point->dr)
            << " FPR=" << fixed6(outcome.operating_point->fpr) << "\n";
  }
  outcome.summary = summary.str();

  if (!config.roc.empty()) write_text(config.roc, roc_to_csv(outcome.roc));
  if (!config.summary.empty()) write_text(config.summary, outcome.summary);
  log << outcome.summary;
  return outcome;
}

void cmd_classify(const RunConfig& config, std::ostream& log) {
  require(config.model, "model");
  require(config.image, "image");
  require(config.out, "out");
  if (config.stride < 1) throw UsageError("--stride must be positive");
  const CascadeModel model = load_cascade(config.model);
  const GrayImage image = read_pgm_file(config.image);
  write_pgm_file(config.out, render_mask(model, image, config.stride));
  log << "wrote mask " << config.out.string() << "\n";
}

}  // namespace roadseg
