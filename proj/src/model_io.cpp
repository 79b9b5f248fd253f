#include "roadseg/model_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "roadseg/error.hpp"

namespace roadseg {

namespace {

constexpr std::string_view kMagic = "roadseg-cascade";
constexpr int kVersion = 1;

std::string real(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

class TokenReader {
 public:
  explicit TokenReader(std::string_view text) : text_(text) {}

  std::string_view next(std::string_view what) {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    if (start == pos_) throw Error(Errc::ModelFormat, "unexpected end of model, wanted " + std::string(what));
    return text_.substr(start, pos_ - start);
  }

  void expect(std::string_view keyword) {
    const auto token = next(keyword);
    if (token != keyword) {
      throw Error(Errc::ModelFormat,
                  "expected '" + std::string(keyword) + "', found '" + std::string(token) + "'");
    }
  }

  template <typename T>
  T number(std::string_view what) {
    const auto token = next(what);
    return parse<T>(token, what);
  }

  template <typename T>
  static T parse(std::string_view token, std::string_view what) {
    T value{};
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      throw Error(Errc::ModelFormat, "bad " + std::string(what) + " '" + std::string(token) + "'");
    }
    return value;
  }

  std::string_view rest_of_line() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    return text_.substr(start, pos_ - start);
  }

  bool at_end() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    return pos_ == text_.size();
  }

 private:
  static bool is_space(char c) noexcept { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string config_echo(const CascadeConfig& c) {
  return "roi_size=" + std::to_string(c.roi_size) +
         " samples_per_class_per_frame=" + std::to_string(c.samples_per_class_per_frame) +
         " target_cascade_fpr=" + real(c.target_cascade_fpr) +
         " max_stages=" + std::to_string(c.max_stages) +
         " max_trees=" + std::to_string(c.stage.max_trees) +
         " target_stage_dr=" + real(c.stage.target_stage_dr) +
         " target_stage_fpr=" + real(c.stage.target_stage_fpr) +
         " eps_min=" + real(c.stage.eps_min) +
         " mining_stride=" + std::to_string(c.mining_stride) + " seed=" + std::to_string(c.seed);
}

void apply_config_entry(CascadeConfig& c, std::string_view key, std::string_view value) {
  using R = TokenReader;
  if (key == "roi_size") c.roi_size = R::parse<int>(value, key);
  else if (key == "samples_per_class_per_frame") c.samples_per_class_per_frame = R::parse<int>(value, key);
  else if (key == "target_cascade_fpr") c.target_cascade_fpr = R::parse<double>(value, key);
  else if (key == "max_stages") c.max_stages = R::parse<int>(value, key);
  else if (key == "max_trees") c.stage.max_trees = R::parse<int>(value, key);
  else if (key == "target_stage_dr") c.stage.target_stage_dr = R::parse<double>(value, key);
  else if (key == "target_stage_fpr") c.stage.target_stage_fpr = R::parse<double>(value, key);
  else if (key == "eps_min") c.stage.eps_min = R::parse<double>(value, key);
  else if (key == "mining_stride") c.mining_stride = R::parse<int>(value, key);
  else if (key == "seed") c.seed = R::parse<std::uint64_t>(value, key);
  else throw Error(Errc::ModelFormat, "unknown config key '" + std::string(key) + "'");
}

}  // namespace

std::string serialize_cascade(const CascadeModel& model) {
  std::string out;
  out += std::string(kMagic) + " " + std::to_string(kVersion) + "\n";
  out += "roi " + std::to_string(model.roi_w) + " " + std::to_string(model.roi_h) + "\n";
  out += "config " + config_echo(model.config) + "\n";
  out += "stages " + std::to_string(model.stages.size()) + "\n";
  for (std::size_t i = 0; i < model.stages.size(); ++i) {
    const StageModel& stage = model.stages[i];
    const StageRates rates = i < model.rates.size() ? model.rates[i] : StageRates{};
    out += "stage " + std::to_string(i) + " dimension " + std::to_string(stage.dimension) +
           " threshold " + real(stage.threshold) + " dr " + real(rates.detection_rate) + " fpr " +
           real(rates.false_positive_rate) + " trees " + std::to_string(stage.trees.size()) + "\n";
    for (std::size_t t = 0; t < stage.trees.size(); ++t) {
      const auto nodes = stage.trees[t].nodes();
      out += "tree " + real(stage.alphas[t]) + " " + std::to_string(nodes.size()) + "\n";
      for (const TreeNode& n : nodes) {
        out += "node " + std::to_string(n.feature) + " " + real(n.threshold) + " " +
               std::to_string(n.left) + " " + std::to_string(n.right) + " " +
               std::to_string(sign(n.leaf)) + "\n";
      }
    }
  }
  out += "end\n";
  return out;
}

CascadeModel deserialize_cascade(std::string_view text) {
  TokenReader in(text);
  in.expect(kMagic);
  const int version = in.number<int>("version");
  if (version != kVersion) {
    throw Error(Errc::ModelFormat, "unsupported model version " + std::to_string(version));
  }
  CascadeModel model;
  in.expect("roi");
  model.roi_w = in.number<int>("roi width");
  model.roi_h = in.number<int>("roi height");

  in.expect("config");
  std::istringstream entries{std::string(in.rest_of_line())};
  for (std::string entry; entries >> entry;) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) throw Error(Errc::ModelFormat, "bad config entry '" + entry + "'");
    apply_config_entry(model.config, std::string_view(entry).substr(0, eq),
                       std::string_view(entry).substr(eq + 1));
  }

  in.expect("stages");
  const auto stage_count = in.number<std::size_t>("stage count");
  if (stage_count > 100'000) throw Error(Errc::ModelFormat, "implausible stage count");
  for (std::size_t i = 0; i < stage_count; ++i) {
    StageModel stage;
    StageRates rates;
    in.expect("stage");
    if (in.number<std::size_t>("stage index") != i) throw Error(Errc::ModelFormat, "stage out of order");
    in.expect("dimension");
    stage.dimension = in.number<std::size_t>("dimension");
    in.expect("threshold");
    stage.threshold = in.number<double>("threshold");
    in.expect("dr");
    rates.detection_rate = in.number<double>("dr");
    in.expect("fpr");
    rates.false_positive_rate = in.number<double>("fpr");
    in.expect("trees");
    const auto tree_count = in.number<std::size_t>("tree count");
    if (tree_count > 1'000'000) throw Error(Errc::ModelFormat, "implausible tree count");
    for (std::size_t t = 0; t < tree_count; ++t) {
      in.expect("tree");
      stage.alphas.push_back(in.number<double>("alpha"));
      const auto node_count = in.number<std::size_t>("node count");
      if (node_count < 1 || node_count > 7) throw Error(Errc::ModelFormat, "bad node count");
      std::vector<TreeNode> nodes(node_count);
      for (TreeNode& n : nodes) {
        in.expect("node");
        n.feature = in.number<int>("feature");
        n.threshold = in.number<double>("node threshold");
        n.left = in.number<int>("left");
        n.right = in.number<int>("right");
        const int leaf = in.number<int>("leaf");
        if (leaf != 1 && leaf != -1) throw Error(Errc::ModelFormat, "leaf label must be +1 or -1");
        n.leaf = static_cast<Label>(leaf);
      }
      try {
        stage.trees.emplace_back(std::move(nodes));
      } catch (const Error& e) {
        throw Error(Errc::ModelFormat, e.what());
      }
    }
    model.stages.push_back(std::move(stage));
    model.rates.push_back(rates);
  }
  in.expect("end");
  if (!in.at_end()) throw Error(Errc::ModelFormat, "trailing data after 'end'");
  validate(model);
  return model;
}

void save_cascade(const std::filesystem::path& path, const CascadeModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot create " + path.string());
  out << serialize_cascade(model);
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

CascadeModel load_cascade(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return deserialize_cascade(text.str());
}

}  // namespace roadseg
