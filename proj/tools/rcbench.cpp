// rcbench: encode digit datasets, drive them through the simulated reservoir,
// and evaluate the readout against the regression baselines.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rcbench/audio_features.hpp"
#include "rcbench/error.hpp"
#include "rcbench/pipeline.hpp"

namespace {

using namespace rcbench;
namespace fs = std::filesystem;

/// Flag values as parsed; unset optionals leave the config untouched.
struct Flags {
  std::string config_path;
  std::optional<std::string> dataset;
  std::optional<std::string> mnist_images;
  std::optional<std::string> mnist_labels;
  std::optional<std::string> audio_dir;
  std::optional<std::size_t> samples;
  std::optional<std::string> sampling;
  std::vector<std::string> methods;
  std::vector<double> delays;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> folds;
  std::optional<std::string> split_mode;
  std::optional<int> threshold;
  std::optional<std::string> f1_average;
  std::optional<double> l2;
  std::optional<std::size_t> max_iter;
  std::optional<double> tau_ns;
  std::optional<std::size_t> nodes;
  std::optional<unsigned> threads;
  bool no_cache = false;
  bool standardize = false;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  cmd->add_option("--dataset", f.dataset, "mnist or audiomnist")->check(CLI::IsMember({"mnist", "audiomnist"}));
  cmd->add_option("--mnist-images", f.mnist_images, "MNIST IDX image file (optionally .gz)");
  cmd->add_option("--mnist-labels", f.mnist_labels, "MNIST IDX label file (optionally .gz)");
  cmd->add_option("--audio-dir", f.audio_dir, "AudioMNIST data directory (one subdirectory per speaker)");
  cmd->add_option("--samples", f.samples, "examples to draw (default 5000 mnist / 6000 audiomnist, 0 = all)");
  cmd->add_option("--sampling", f.sampling, "stratified or uniform")->check(CLI::IsMember({"stratified", "uniform"}));
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output directory for caches and reports");
  cmd->add_option("--threshold", f.threshold, "MNIST binarization threshold (0-255)")->check(CLI::Range(0, 255));
  cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  cmd->add_flag("--no-cache", f.no_cache, "do not read or write caches");
}

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--methods", f.methods, "subset of cube-5ns,cube-10ns,cube-20ns,direct,summed,noise")->delimiter(',');
  cmd->add_option("--delay-ns", f.delays, "extra reservoir delays; each adds a cube-<delay>ns row")->delimiter(',');
  cmd->add_option("--folds", f.folds, "number of folds (or holdout repeats)");
  cmd->add_option("--split-mode", f.split_mode, "kfold or repeated-holdout")
      ->check(CLI::IsMember({"kfold", "repeated-holdout"}));
  cmd->add_option("--f1", f.f1_average, "F1 averaging: macro or weighted")->check(CLI::IsMember({"macro", "weighted"}));
  cmd->add_option("--l2", f.l2, "readout L2 strength");
  cmd->add_option("--max-iter", f.max_iter, "readout optimizer iteration cap");
  cmd->add_option("--tau-ns", f.tau_ns, "reservoir time constant");
  cmd->add_option("--nodes", f.nodes, "reservoir state dimension");
  cmd->add_flag("--standardize", f.standardize, "standardize features before training the readout");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig build_config(const Flags& f) {
  RunConfig cfg;
  if (const char* root = std::getenv("RCBENCH_DATA_ROOT")) {
    const fs::path base(root);
    cfg.mnist_images = base / "mnist" / "train-images-idx3-ubyte";
    cfg.mnist_labels = base / "mnist" / "train-labels-idx1-ubyte";
    cfg.audio_dir = base / "AudioMNIST" / "data";
  }
  bool samples_set = false;
  if (!f.config_path.empty()) {
    const std::string text = read_text(f.config_path);
    apply_config_json(cfg, text);
    samples_set = text.find("\"samples\"") != std::string::npos;
  }
  if (f.dataset) cfg.dataset = *f.dataset == "mnist" ? DatasetKind::Mnist : DatasetKind::AudioMnist;
  if (f.mnist_images) cfg.mnist_images = *f.mnist_images;
  if (f.mnist_labels) cfg.mnist_labels = *f.mnist_labels;
  if (f.audio_dir) cfg.audio_dir = *f.audio_dir;
  if (f.samples) {
    cfg.samples = *f.samples;
    samples_set = true;
  }
  if (!samples_set) cfg.samples = cfg.dataset == DatasetKind::Mnist ? 5000 : 6000;
  if (f.sampling) cfg.sampling = *f.sampling == "stratified" ? Sampling::Stratified : Sampling::Uniform;
  if (!f.methods.empty()) cfg.methods = f.methods;
  for (double d : f.delays) cfg.methods.push_back(MethodSpec{MethodSpec::Kind::Cube, d}.name());
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out_dir = *f.out;
  if (f.folds) cfg.folds = *f.folds;
  if (f.split_mode) cfg.split_mode = *f.split_mode == "kfold" ? SplitMode::KFold : SplitMode::RepeatedHoldout;
  if (f.threshold) cfg.threshold = static_cast<std::uint8_t>(*f.threshold);
  if (f.f1_average) cfg.f1_average = *f.f1_average == "macro" ? F1Average::Macro : F1Average::Weighted;
  if (f.l2) cfg.train.l2_lambda = *f.l2;
  if (f.max_iter) cfg.train.max_iter = *f.max_iter;
  if (f.tau_ns) cfg.reservoir.tau_ns = *f.tau_ns;
  if (f.nodes) cfg.reservoir.n_nodes = *f.nodes;
  if (f.threads) cfg.threads = *f.threads;
  if (f.no_cache) cfg.use_cache = false;
  if (f.standardize) cfg.train.standardize = true;

  for (const auto& m : cfg.methods) parse_method(m);
  if (cfg.methods.empty()) throw Error(ErrorCode::Usage, "--methods must name at least one method");
  const bool mnist = cfg.dataset == DatasetKind::Mnist;
  if (mnist && (cfg.mnist_images.empty() || cfg.mnist_labels.empty())) {
    throw Error(ErrorCode::Usage, "--mnist-images and --mnist-labels are required (or set RCBENCH_DATA_ROOT)");
  }
  if (!mnist && cfg.audio_dir.empty()) {
    throw Error(ErrorCode::Usage, "--audio-dir is required (or set RCBENCH_DATA_ROOT)");
  }
  for (const fs::path& p : mnist ? std::vector<fs::path>{cfg.mnist_images, cfg.mnist_labels}
                                 : std::vector<fs::path>{cfg.audio_dir}) {
    if (!fs::exists(p)) throw Error(ErrorCode::Io, p.string() + " does not exist");
  }
  return cfg;
}

int dump(const std::string& what, const fs::path& input, const RunConfig& cfg) {
  if (what == "mfcc") {
    const auto spec = mfcc32(load_wav(input));
    std::cout << to_csv(spec);
    return 0;
  }
  const EncodedDataset data = read_encoded_cache(input);
  if (what == "bits" || what == "symbols") {
    for (const auto& ex : data.examples) std::cout << (what == "bits" ? to_hex(ex.bits) : to_hex(ex.symbols)) << '\n';
    return 0;
  }
  // traces: one line per example, 8,192 comma-separated values.
  const Reservoir reservoir = build_reservoir(reservoir_for(cfg, cfg.reservoir.delay_ns));
  std::string line;
  char buf[32];
  for (const auto& ex : data.examples) {
    const Trace t = drive(reservoir, ex.symbols);
    line.clear();
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", t[i]);
      if (i != 0) line += ',';
      line += buf;
    }
    std::cout << line << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reservoir-computing digit classification benchmark"};
  app.require_subcommand(1);

  Flags encode_flags;
  auto* encode = app.add_subcommand("encode", "Encode a dataset into the symbol-stream cache");
  add_common_flags(encode, encode_flags);

  Flags run_flags;
  auto* run = app.add_subcommand("run", "Evaluate methods with cross-validation and write reports");
  add_common_flags(run, run_flags);
  add_run_flags(run, run_flags);

  std::string dump_what;
  std::string dump_input;
  double dump_delay = 10.0;
  std::uint64_t dump_seed = 0;
  auto* dump_cmd = app.add_subcommand("dump", "Debug dumps: bits/symbols as hex, traces or MFCCs as CSV");
  dump_cmd->add_option("what", dump_what, "bits, symbols, traces or mfcc")
      ->required()
      ->check(CLI::IsMember({"bits", "symbols", "traces", "mfcc"}));
  dump_cmd->add_option("input", dump_input, "encoded cache file, or a .wav file for mfcc")->required()->check(CLI::ExistingFile);
  dump_cmd->add_option("--delay-ns", dump_delay, "reservoir delay for trace dumps");
  dump_cmd->add_option("--seed", dump_seed, "master seed for trace dumps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*encode) {
      cmd_encode(build_config(encode_flags), std::cerr);
    } else if (*run) {
      const RunConfig cfg = build_config(run_flags);
      const ExperimentReport report = cmd_run(cfg, std::cerr);
      std::cout << report_text(report);
    } else if (*dump_cmd) {
      RunConfig cfg;
      cfg.seed = dump_seed;
      cfg.reservoir.delay_ns = dump_delay;
      return dump(dump_what, dump_input, cfg);
    }
  } catch (const Error& e) {
    std::cerr << "rcbench: " << e.what() << '\n';
    return e.code() == ErrorCode::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "rcbench: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
