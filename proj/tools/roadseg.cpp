// Command-line front end: synth, train, eval, classify.

#include <iostream>

#include <CLI11.hpp>

#include "roadseg/commands.hpp"
#include "roadseg/error.hpp"

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

struct Flags {
  std::string config;
  std::string data, model, report, roc, summary, image, out;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_train;
  std::optional<std::uint64_t> split_seed;
  std::optional<std::uint64_t> eval_seed;
  std::optional<int> stride;
  std::optional<double> max_fpr;
};

roadseg::RunConfig resolve(const Flags& f, std::string_view command) {
  roadseg::RunConfig config;
  if (!f.config.empty()) config = roadseg::load_run_config(f.config);
  auto set_path = [](std::filesystem::path& dst, const std::string& src) {
    if (!src.empty()) dst = src;
  };
  set_path(config.data, f.data);
  set_path(config.model, f.model);
  set_path(config.report, f.report);
  set_path(config.roc, f.roc);
  set_path(config.summary, f.summary);
  set_path(config.image, f.image);
  set_path(config.out, f.out);
  if (f.n) config.synth_frames = *f.n;
  if (f.seed) {
    if (command == "synth") {
      config.synth_seed = *f.seed;
    } else {
      config.cascade.seed = *f.seed;
    }
  }
  if (f.n_train) config.n_train = *f.n_train;
  if (f.split_seed) config.split_seed = *f.split_seed;
  if (f.eval_seed) config.eval_seed = *f.eval_seed;
  if (f.stride) config.stride = *f.stride;
  if (f.max_fpr) config.max_fpr = *f.max_fpr;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Road / non-road classification with a cascade of boosted decision trees"};
  app.require_subcommand(1);
  Flags flags;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic annotated corpus");
  synth->add_option("--n", flags.n, "Number of frames (default 100)");
  synth->add_option("--seed", flags.seed, "Master seed");
  synth->add_option("--out", flags.out, "Output directory");
  synth->add_option("--config", flags.config, "key=value run configuration");

  auto* train = app.add_subcommand("train", "Train a cascade on the training split");
  train->add_option("--data", flags.data, "Dataset directory (annotations.xml + PGM frames)");
  train->add_option("--model", flags.model, "Output model file");
  train->add_option("--report", flags.report, "Output training report");
  train->add_option("--n-train", flags.n_train, "Training frames (default 60% of the corpus)");
  train->add_option("--split-seed", flags.split_seed, "Seed of the train/test split");
  train->add_option("--seed", flags.seed, "Sampling and mining seed");
  train->add_option("--config", flags.config, "key=value run configuration");

  auto* eval = app.add_subcommand("eval", "Evaluate a cascade on the held-out split");
  eval->add_option("--model", flags.model, "Model file");
  eval->add_option("--data", flags.data, "Dataset directory");
  eval->add_option("--split-seed", flags.split_seed, "Seed of the train/test split");
  eval->add_option("--n-train", flags.n_train, "Training frames used by the split");
  eval->add_option("--eval-seed", flags.eval_seed, "Seed for held-out ROI sampling");
  eval->add_option("--max-fpr", flags.max_fpr, "FPR bound of the reported operating point");
  eval->add_option("--roc", flags.roc, "Output ROC CSV");
  eval->add_option("--summary", flags.summary, "Output confusion summary");
  eval->add_option("--config", flags.config, "key=value run configuration");

  auto* classify = app.add_subcommand("classify", "Render a road mask for one image");
  classify->add_option("--model", flags.model, "Model file");
  classify->add_option("--image", flags.image, "Input PGM image");
  classify->add_option("--stride", flags.stride, "Sliding-window stride (default 5)");
  classify->add_option("--out", flags.out, "Output mask PGM");
  classify->add_option("--config", flags.config, "key=value run configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (synth->parsed()) {
      roadseg::cmd_synth(resolve(flags, "synth"), std::cout);
    } else if (train->parsed()) {
      roadseg::cmd_train(resolve(flags, "train"), std::cout);
    } else if (eval->parsed()) {
      roadseg::cmd_eval(resolve(flags, "eval"), std::cout);
    } else if (classify->parsed()) {
      roadseg::cmd_classify(resolve(flags, "classify"), std::cout);
    }
  } catch (const roadseg::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return 0;
}
