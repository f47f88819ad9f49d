#include "rcbench/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <ostream>

#include "json.hpp"

#include "rcbench/audio_features.hpp"
#include "rcbench/datasets.hpp"
#include "rcbench/digest.hpp"
#include "rcbench/error.hpp"
#include "rcbench/parallel.hpp"
#include "rcbench/rng.hpp"

namespace rcbench {
namespace {

namespace fs = std::filesystem;

constexpr char kEncodedMagic[8] = {'R', 'C', 'B', 'E', 'N', 'C', '\0', '\x01'};
constexpr char kTraceMagic[8] = {'R', 'C', 'B', 'T', 'R', 'C', '\0', '\x01'};
constexpr std::size_t kPackedBits = kSequenceLength / 8;

std::string format_delay(double delay_ns) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", delay_ns);
  return buf;
}

const char* dataset_name(DatasetKind kind) { return kind == DatasetKind::Mnist ? "mnist" : "audiomnist"; }

// Little-endian binary helpers for the cache files.
class Writer {
 public:
  explicit Writer(const fs::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(ErrorCode::Io, "cannot write " + path.string());
  }
  void bytes(const void* data, std::size_t n) { out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n)); }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  void finish() {
    out_.flush();
    if (!out_) throw Error(ErrorCode::Io, "failed writing " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const fs::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw Error(ErrorCode::Io, "cannot open " + path.string());
  }
  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw Error(ErrorCode::Truncated, path_.string());
  }
  std::uint64_t u64() {
    unsigned char b[8];
    bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string str() {
    const std::uint64_t n = u64();
    if (n > (1u << 20)) throw Error(ErrorCode::Corrupt, path_.string() + ": implausible string length");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  void expect_magic(const char (&magic)[8]) {
    char got[8];
    bytes(got, 8);
    if (std::memcmp(got, magic, 8) != 0) throw Error(ErrorCode::MagicMismatch, path_.string());
  }

 private:
  fs::path path_;
  std::ifstream in_;
};

std::vector<std::size_t> choose_indices(std::span<const Digit> labels, const RunConfig& cfg) {
  if (cfg.samples == 0) {
    std::vector<std::size_t> all(labels.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  const std::uint64_t seed = derive_seed(cfg.seed, SeedStream::Subsample);
  if (cfg.sampling == Sampling::Stratified) return stratified_subsample_indices(labels, cfg.samples, seed);
  return uniform_subsample_indices(labels.size(), cfg.samples, seed);
}

EncodedExample encode_bits(Digit label, BitSequence bits, std::string source) {
  EncodedExample e;
  e.label = label;
  e.symbols = window_encode(bits);
  e.bits = std::move(bits);
  e.source = std::move(source);
  return e;
}

EncodedDataset encode_mnist(const RunConfig& cfg, std::ostream& log) {
  const auto examples = load_mnist(cfg.mnist_images, cfg.mnist_labels);
  std::vector<Digit> labels;
  labels.reserve(examples.size());
  for (const auto& e : examples) labels.push_back(e.label);
  const auto picked = choose_indices(labels, cfg);
  log << "encoding " << picked.size() << " of " << examples.size() << " MNIST images\n";

  EncodedDataset data;
  data.examples.resize(picked.size());
  parallel_for(picked.size(), cfg.threads, [&](std::size_t i) {
    const auto& ex = examples[picked[i]];
    data.examples[i] = encode_bits(ex.label, encode_image_bits(std::get<GrayImage>(ex.payload), cfg.threshold), ex.source);
  });
  return data;
}

EncodedDataset encode_audio(const RunConfig& cfg, std::ostream& log) {
  const auto refs = scan_audio_tree(cfg.audio_dir);
  std::vector<std::optional<BitSequence>> encoded(refs.size());
  parallel_for(refs.size(), cfg.threads, [&](std::size_t i) {
    const auto spec = try_mfcc32(load_wav(refs[i].path));
    if (spec) encoded[i] = scan_vertical(binarize_mean(spec->data.values));
  });

  EncodedDataset data;
  std::vector<std::size_t> usable;
  std::vector<Digit> labels;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (encoded[i]) {
      usable.push_back(i);
      labels.push_back(refs[i].label);
    } else {
      const std::string name = fs::relative(refs[i].path, cfg.audio_dir).generic_string();
      data.dropped.push_back(name);
      log << "dropped " << name << ": too short for 32 MFCC frames\n";
    }
  }
  log << "audio: " << refs.size() << " clips, " << data.dropped.size() << " dropped, " << usable.size() << " usable\n";

  const auto picked = choose_indices(labels, cfg);
  data.examples.reserve(picked.size());
  for (std::size_t p : picked) {
    const std::size_t i = usable[p];
    data.examples.push_back(encode_bits(refs[i].label, std::move(*encoded[i]),
                                        fs::relative(refs[i].path, cfg.audio_dir).generic_string()));
  }
  return data;
}

std::vector<double> features_row(const MethodSpec& method, const EncodedExample& ex, std::size_t index,
                                 const RunConfig& cfg) {
  switch (method.kind) {
    case MethodSpec::Kind::Direct: return features_direct(ex.bits);
    case MethodSpec::Kind::Summed: return features_summed(ex.bits);
    case MethodSpec::Kind::Noise:
      return features_noise(ex.bits, {0.0, cfg.noise_sigma, noise_seed_for(derive_seed(cfg.seed, SeedStream::Noise), index)});
    case MethodSpec::Kind::Cube: break;
  }
  throw Error(ErrorCode::Usage, "reservoir features are produced by drive_all");
}

FeatureMatrix read_trace_cache(const fs::path& path, std::uint64_t key, std::size_t rows) {
  Reader in(path);
  in.expect_magic(kTraceMagic);
  if (in.u64() != key) throw Error(ErrorCode::Corrupt, path.string() + ": key mismatch");
  const std::uint64_t n = in.u64();
  const std::uint64_t d = in.u64();
  if (n != rows || d != kTraceLength) throw Error(ErrorCode::Corrupt, path.string() + ": shape mismatch");
  FeatureMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = in.f64();
  }
  return m;
}

void write_trace_cache(const fs::path& path, std::uint64_t key, const FeatureMatrix& m) {
  const fs::path tmp = path.string() + ".tmp";
  {
    Writer out(tmp);
    out.bytes(kTraceMagic, 8);
    out.u64(key);
    out.u64(static_cast<std::uint64_t>(m.rows()));
    out.u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) out.f64(m(i, j));
    }
    out.finish();
  }
  fs::rename(tmp, path);
}

}  // namespace

std::string MethodSpec::name() const {
  switch (kind) {
    case Kind::Cube: return "cube-" + format_delay(delay_ns) + "ns";
    case Kind::Direct: return "direct";
    case Kind::Summed: return "summed";
    case Kind::Noise: return "noise";
  }
  return "?";
}

std::string MethodSpec::group() const { return kind == Kind::Cube ? "reservoir" : "baseline"; }

MethodSpec parse_method(const std::string& name) {
  if (name == "direct") return {MethodSpec::Kind::Direct, 0.0};
  if (name == "summed") return {MethodSpec::Kind::Summed, 0.0};
  if (name == "noise") return {MethodSpec::Kind::Noise, 0.0};
  if (name.starts_with("cube-") && name.ends_with("ns") && name.size() > 7) {
    const std::string number = name.substr(5, name.size() - 7);
    char* end = nullptr;
    const double delay = std::strtod(number.c_str(), &end);
    if (end == number.c_str() + number.size() && std::isfinite(delay) && delay > 0.0) {
      return {MethodSpec::Kind::Cube, delay};
    }
  }
  throw Error(ErrorCode::Usage, "unknown method '" + name +
                                    "' (expected direct, summed, noise or cube-<delay>ns such as cube-10ns)");
}

const std::vector<std::string>& default_methods() {
  static const std::vector<std::string> methods{"cube-5ns", "cube-10ns", "cube-20ns", "direct", "summed", "noise"};
  return methods;
}

std::string config_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["dataset"] = dataset_name(cfg.dataset);
  j["mnist_images"] = cfg.mnist_images.generic_string();
  j["mnist_labels"] = cfg.mnist_labels.generic_string();
  j["audio_dir"] = cfg.audio_dir.generic_string();
  j["samples"] = cfg.samples;
  j["sampling"] = cfg.sampling == Sampling::Stratified ? "stratified" : "uniform";
  j["methods"] = cfg.methods;
  j["seed"] = cfg.seed;
  j["threshold"] = cfg.threshold;
  j["folds"] = cfg.folds;
  j["split_mode"] = cfg.split_mode == SplitMode::KFold ? "kfold" : "repeated-holdout";
  j["f1_average"] = cfg.f1_average == F1Average::Macro ? "macro" : "weighted";
  j["noise_sigma"] = cfg.noise_sigma;
  j["reservoir"] = {{"n_nodes", cfg.reservoir.n_nodes},
                    {"spectral_radius", cfg.reservoir.spectral_radius_target},
                    {"input_scale", cfg.reservoir.input_scale},
                    {"bias_scale", cfg.reservoir.bias_scale},
                    {"tau_ns", cfg.reservoir.tau_ns}};
  j["train"] = {{"max_iter", cfg.train.max_iter},
                {"grad_tol", cfg.train.grad_tol},
                {"l2_lambda", cfg.train.l2_lambda},
                {"standardize", cfg.train.standardize}};
  return j.dump();
}

void apply_config_json(RunConfig& cfg, const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Usage, std::string("config file: ") + e.what());
  }
  try {
    if (j.contains("dataset")) {
      const auto d = j["dataset"].get<std::string>();
      if (d == "mnist") cfg.dataset = DatasetKind::Mnist;
      else if (d == "audiomnist") cfg.dataset = DatasetKind::AudioMnist;
      else throw Error(ErrorCode::Usage, "config: unknown dataset '" + d + "'");
    }
    if (j.contains("mnist_images")) cfg.mnist_images = j["mnist_images"].get<std::string>();
    if (j.contains("mnist_labels")) cfg.mnist_labels = j["mnist_labels"].get<std::string>();
    if (j.contains("audio_dir")) cfg.audio_dir = j["audio_dir"].get<std::string>();
    if (j.contains("samples")) cfg.samples = j["samples"].get<std::size_t>();
    if (j.contains("sampling")) {
      const auto s = j["sampling"].get<std::string>();
      if (s != "stratified" && s != "uniform") throw Error(ErrorCode::Usage, "config: unknown sampling '" + s + "'");
      cfg.sampling = s == "stratified" ? Sampling::Stratified : Sampling::Uniform;
    }
    if (j.contains("methods")) {
      cfg.methods = j["methods"].get<std::vector<std::string>>();
      for (const auto& m : cfg.methods) parse_method(m);
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threshold")) cfg.threshold = j["threshold"].get<std::uint8_t>();
    if (j.contains("folds")) cfg.folds = j["folds"].get<std::size_t>();
    if (j.contains("split_mode")) {
      const auto s = j["split_mode"].get<std::string>();
      if (s != "kfold" && s != "repeated-holdout") throw Error(ErrorCode::Usage, "config: unknown split_mode '" + s + "'");
      cfg.split_mode = s == "kfold" ? SplitMode::KFold : SplitMode::RepeatedHoldout;
    }
    if (j.contains("f1_average")) {
      const auto s = j["f1_average"].get<std::string>();
      if (s != "macro" && s != "weighted") throw Error(ErrorCode::Usage, "config: unknown f1_average '" + s + "'");
      cfg.f1_average = s == "macro" ? F1Average::Macro : F1Average::Weighted;
    }
    if (j.contains("noise_sigma")) cfg.noise_sigma = j["noise_sigma"].get<double>();
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    if (j.contains("cache")) cfg.use_cache = j["cache"].get<bool>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<unsigned>();
    if (j.contains("reservoir")) {
      const auto& r = j["reservoir"];
      cfg.reservoir.n_nodes = r.value("n_nodes", cfg.reservoir.n_nodes);
      cfg.reservoir.spectral_radius_target = r.value("spectral_radius", cfg.reservoir.spectral_radius_target);
      cfg.reservoir.input_scale = r.value("input_scale", cfg.reservoir.input_scale);
      cfg.reservoir.bias_scale = r.value("bias_scale", cfg.reservoir.bias_scale);
      cfg.reservoir.tau_ns = r.value("tau_ns", cfg.reservoir.tau_ns);
    }
    if (j.contains("train")) {
      const auto& t = j["train"];
      cfg.train.max_iter = t.value("max_iter", cfg.train.max_iter);
      cfg.train.grad_tol = t.value("grad_tol", cfg.train.grad_tol);
      cfg.train.l2_lambda = t.value("l2_lambda", cfg.train.l2_lambda);
      cfg.train.standardize = t.value("standardize", cfg.train.standardize);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Usage, std::string("config file: ") + e.what());
  }
}

std::uint64_t RunConfig::encoding_digest() const {
  nlohmann::ordered_json j;
  j["format"] = "encoded/v1";
  j["dataset"] = dataset_name(dataset);
  if (dataset == DatasetKind::Mnist) {
    j["mnist_images"] = mnist_images.generic_string();
    j["mnist_labels"] = mnist_labels.generic_string();
    j["threshold"] = threshold;
  } else {
    j["audio_dir"] = audio_dir.generic_string();
  }
  j["samples"] = samples;
  j["sampling"] = sampling == Sampling::Stratified ? "stratified" : "uniform";
  j["seed"] = seed;
  return fnv1a64(j.dump());
}

std::uint64_t RunConfig::run_digest() const { return fnv1a64(config_json(*this)); }

EncodedDataset encode_dataset(const RunConfig& cfg, std::ostream& log) {
  EncodedDataset data = cfg.dataset == DatasetKind::Mnist ? encode_mnist(cfg, log) : encode_audio(cfg, log);
  data.digest = cfg.encoding_digest();
  return data;
}

void write_encoded_cache(const fs::path& path, const EncodedDataset& data) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    Writer out(tmp);
    out.bytes(kEncodedMagic, 8);
    out.u64(data.digest);
    out.u64(data.dropped.size());
    for (const auto& name : data.dropped) out.str(name);
    out.u64(data.examples.size());
    for (const auto& ex : data.examples) {
      if (ex.bits.bits.size() != kSequenceLength || ex.symbols.symbols.size() != kSequenceLength) {
        throw Error(ErrorCode::WrongLength, "encoded example " + ex.source + " has the wrong length");
      }
      out.bytes(&ex.label, 1);
      out.bytes(ex.symbols.symbols.data(), kSequenceLength);
      std::uint8_t packed[kPackedBits] = {};
      for (std::size_t i = 0; i < kSequenceLength; ++i) {
        if (ex.bits.bits[i]) packed[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
      }
      out.bytes(packed, kPackedBits);
      out.str(ex.source);
    }
    out.finish();
  }
  fs::rename(tmp, path);
}

EncodedDataset read_encoded_cache(const fs::path& path) {
  Reader in(path);
  in.expect_magic(kEncodedMagic);
  EncodedDataset data;
  data.digest = in.u64();
  const std::uint64_t dropped = in.u64();
  for (std::uint64_t i = 0; i < dropped; ++i) data.dropped.push_back(in.str());
  const std::uint64_t count = in.u64();
  data.examples.resize(count);
  for (auto& ex : data.examples) {
    in.bytes(&ex.label, 1);
    if (ex.label >= kNumClasses) throw Error(ErrorCode::InvalidLabel, path.string());
    ex.symbols.symbols.resize(kSequenceLength);
    in.bytes(ex.symbols.symbols.data(), kSequenceLength);
    std::uint8_t packed[kPackedBits];
    in.bytes(packed, kPackedBits);
    ex.bits.bits.resize(kSequenceLength);
    for (std::size_t i = 0; i < kSequenceLength; ++i) ex.bits.bits[i] = (packed[i / 8] >> (7 - i % 8)) & 1u;
    ex.source = in.str();
  }
  return data;
}

fs::path encoded_cache_path(const RunConfig& cfg) {
  return cfg.out_dir / "cache" / ("encoded-" + hex64(cfg.encoding_digest()) + ".bin");
}

EncodedDataset load_or_encode(const RunConfig& cfg, std::ostream& log) {
  const fs::path path = encoded_cache_path(cfg);
  if (cfg.use_cache && fs::exists(path)) {
    try {
      EncodedDataset cached = read_encoded_cache(path);
      if (cached.digest == cfg.encoding_digest()) {
        log << "using encoded cache " << path.string() << " (" << cached.examples.size() << " examples)\n";
        return cached;
      }
    } catch (const Error& e) {
      log << "ignoring unreadable cache " << path.string() << ": " << e.what() << "\n";
    }
  }
  EncodedDataset data = encode_dataset(cfg, log);
  if (cfg.use_cache) {
    write_encoded_cache(path, data);
    log << "wrote " << path.string() << "\n";
  }
  return data;
}

ReservoirConfig reservoir_for(const RunConfig& cfg, double delay_ns) {
  ReservoirConfig rc = cfg.reservoir;
  rc.delay_ns = delay_ns;
  rc.seed = derive_seed(cfg.seed, SeedStream::Reservoir);
  return rc;
}

FeatureMatrix drive_all(const Reservoir& reservoir, const EncodedDataset& data, unsigned threads) {
  FeatureMatrix traces(static_cast<Eigen::Index>(data.examples.size()), static_cast<Eigen::Index>(kTraceLength));
  parallel_for(data.examples.size(), threads, [&](std::size_t i) {
    const Trace t = drive(reservoir, data.examples[i].symbols);
    traces.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
  });
  return traces;
}

FeatureMatrix method_features(const MethodSpec& method, const EncodedDataset& data, const RunConfig& cfg,
                              std::ostream& log) {
  if (method.kind == MethodSpec::Kind::Cube) {
    const ReservoirConfig rc = reservoir_for(cfg, method.delay_ns);
    const std::uint64_t key = fnv1a64(rc.canonical(), fnv1a64(hex64(data.digest)));
    const fs::path path = cfg.out_dir / "cache" / ("traces-" + hex64(key) + ".bin");
    if (cfg.use_cache && fs::exists(path)) {
      try {
        FeatureMatrix cached = read_trace_cache(path, key, data.examples.size());
        log << method.name() << ": using trace cache " << path.string() << "\n";
        return cached;
      } catch (const Error& e) {
        log << "ignoring unreadable trace cache " << path.string() << ": " << e.what() << "\n";
      }
    }
    log << method.name() << ": driving " << data.examples.size() << " streams through the reservoir\n";
    FeatureMatrix traces = drive_all(build_reservoir(rc), data, cfg.threads);
    if (cfg.use_cache) {
      fs::create_directories(path.parent_path());
      write_trace_cache(path, key, traces);
    }
    return traces;
  }
  FeatureMatrix m(static_cast<Eigen::Index>(data.examples.size()), static_cast<Eigen::Index>(kSequenceLength));
  for (std::size_t i = 0; i < data.examples.size(); ++i) {
    const auto row = features_row(method, data.examples[i], i, cfg);
    m.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(row.data(), static_cast<Eigen::Index>(row.size()));
  }
  return m;
}

fs::path cmd_encode(const RunConfig& cfg, std::ostream& log) {
  RunConfig with_cache = cfg;
  with_cache.use_cache = true;
  const fs::path path = encoded_cache_path(with_cache);
  EncodedDataset data = encode_dataset(with_cache, log);
  write_encoded_cache(path, data);
  log << "wrote " << data.examples.size() << " encoded examples to " << path.string() << "\n";
  return path;
}

ExperimentReport cmd_run(const RunConfig& cfg, std::ostream& log) {
  if (cfg.methods.empty()) throw Error(ErrorCode::Usage, "no methods requested");
  std::vector<MethodSpec> methods;
  for (const auto& name : cfg.methods) methods.push_back(parse_method(name));
  std::stable_sort(methods.begin(), methods.end(), [](const MethodSpec& a, const MethodSpec& b) {
    return a.kind == MethodSpec::Kind::Cube && b.kind != MethodSpec::Kind::Cube;
  });

  const EncodedDataset data = load_or_encode(cfg, log);
  if (data.examples.empty()) throw Error(ErrorCode::Empty, "encoded dataset is empty");
  std::vector<Digit> labels;
  labels.reserve(data.examples.size());
  for (const auto& ex : data.examples) labels.push_back(ex.label);

  const std::uint64_t fold_seed = derive_seed(cfg.seed, SeedStream::Folds);
  // k-fold is always run; the holdout mode adds an 80/20 row per method.
  const std::vector<Split> splits = kfold_splits(kfold_plan(labels, cfg.folds, fold_seed));
  std::vector<Split> holdout;
  if (cfg.split_mode == SplitMode::RepeatedHoldout) holdout = repeated_holdout(labels, cfg.folds, 0.2, fold_seed);

  ExperimentReport report;
  report.metadata["dataset"] = dataset_name(cfg.dataset);
  report.metadata["samples"] = std::to_string(data.examples.size());
  report.metadata["dropped"] = std::to_string(data.dropped.size());
  report.metadata["seed"] = std::to_string(cfg.seed);
  report.metadata["config_digest"] = hex64(cfg.run_digest());
  report.metadata["encoding_digest"] = hex64(data.digest);
  report.metadata["split_mode"] = cfg.split_mode == SplitMode::KFold ? "kfold" : "repeated-holdout";
  report.metadata["folds"] = std::to_string(splits.size());
  if (!holdout.empty()) report.metadata["holdout_repeats"] = std::to_string(holdout.size());
  report.metadata["f1_average"] = cfg.f1_average == F1Average::Macro ? "macro" : "weighted";

  for (const auto& method : methods) {
    const FeatureMatrix features = method_features(method, data, cfg, log);
    log << method.name() << ": evaluating " << splits.size() << " splits\n";
    report.rows.push_back(
        evaluate_features(method.name(), method.group(), features, labels, splits, cfg.train, cfg.f1_average, cfg.threads));
    const auto& row = report.rows.back();
    log << method.name() << ": accuracy " << row.accuracy.mean << " (sigma " << row.accuracy.std << "), F1 "
        << row.f1.mean << "\n";
    if (!holdout.empty()) {
      report.rows.push_back(evaluate_features(method.name() + " (80/20)", method.group(), features, labels, holdout,
                                              cfg.train, cfg.f1_average, cfg.threads));
    }
  }

  fs::create_directories(cfg.out_dir);
  const auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(cfg.out_dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + (cfg.out_dir / name).string());
    out << text;
  };
  write("report.json", report_json(report));
  write("report.txt", report_text(report));
  write("folds.csv", report_fold_csv(report));
  return report;
}

}  // namespace rcbench
