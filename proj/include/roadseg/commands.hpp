#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "roadseg/cascade.hpp"
#include "roadseg/evaluation.hpp"

namespace roadseg {

/// Bad or missing command-line input; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key=value run configuration. Every key has a default; unknown keys are rejected.
struct RunConfig {
  CascadeConfig cascade;

  std::size_t n_train = 0;  // 0 selects 60% of the corpus
  std::uint64_t split_seed = 7;
  int eval_samples_per_class = 140;
  std::uint64_t eval_seed = 11;
  double max_fpr = 0.25;  // operating-point constraint reported by eval

  std::size_t synth_frames = 100;
  std::uint64_t synth_seed = 7;

  int stride = 5;

  std::filesystem::path data;
  std::filesystem::path model;
  std::filesystem::path report;
  std::filesystem::path roc;
  std::filesystem::path summary;
  std::filesystem::path image;
  std::filesystem::path out;
};

/// Parses `key = value` lines; `#` starts a comment. Throws Errc::InvalidConfig.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

/// Number of training frames for a corpus of `total` frames under `config`.
std::size_t resolve_n_train(const RunConfig& config, std::size_t total);

struct TrainOutcome {
  CascadeTrainingResult result;
  std::string report;
};

struct EvalOutcome {
  RocCurve roc;
  ConfusionCounts counts;
  std::optional<RocPoint> operating_point;
  std::string summary;
};

/// Writes a synthetic corpus to `config.out`.
void cmd_synth(const RunConfig& config, std::ostream& log);

/// Trains on the training split of `config.data`; writes `config.model` and the report.
TrainOutcome cmd_train(const RunConfig& config, std::ostream& log);

/// Scores held-out random ROIs; writes the ROC CSV and confusion summary.
EvalOutcome cmd_eval(const RunConfig& config, std::ostream& log);

/// Renders the road mask of `config.image` into `config.out`.
void cmd_classify(const RunConfig& config, std::ostream& log);

/// Plain-text training report: per-stage DR_i/FPR_i and their products.
std::string format_training_report(const CascadeTrainingResult& result, double wall_seconds);

}  // namespace roadseg
