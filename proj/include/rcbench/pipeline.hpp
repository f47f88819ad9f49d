#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rcbench/baselines.hpp"
#include "rcbench/encoding.hpp"
#include "rcbench/evaluation.hpp"
#include "rcbench/readout.hpp"
#include "rcbench/reservoir.hpp"

namespace rcbench {

enum class DatasetKind { Mnist, AudioMnist };
enum class SplitMode { KFold, RepeatedHoldout };
enum class Sampling { Stratified, Uniform };

struct MethodSpec {
  enum class Kind { Cube, Direct, Summed, Noise };
  Kind kind = Kind::Direct;
  double delay_ns = 0.0;  // Cube only

  std::string name() const;  // "cube-10ns", "direct", ...
  std::string group() const;  // "reservoir" or "baseline"
};

/// Accepts "direct", "summed", "noise" and "cube-<delay>ns" with a positive
/// delay. Throws Error{Usage} otherwise.
MethodSpec parse_method(const std::string& name);

const std::vector<std::string>& default_methods();

struct RunConfig {
  DatasetKind dataset = DatasetKind::Mnist;
  std::filesystem::path mnist_images;
  std::filesystem::path mnist_labels;
  std::filesystem::path audio_dir;
  std::size_t samples = 5000;  // 0 = every usable example
  Sampling sampling = Sampling::Stratified;
  std::vector<std::string> methods = default_methods();
  std::uint64_t seed = 0;
  ReservoirConfig reservoir;  // delay_ns and seed are set per method
  TrainConfig train;
  double noise_sigma = 0.05;
  std::uint8_t threshold = kDefaultThreshold;
  std::size_t folds = 10;
  SplitMode split_mode = SplitMode::KFold;
  F1Average f1_average = F1Average::Macro;
  std::filesystem::path out_dir = "rcbench-out";
  bool use_cache = true;
  unsigned threads = 0;

  /// Hash of everything that determines the encoded dataset.
  std::uint64_t encoding_digest() const;
  /// Hash of everything that determines the report.
  std::uint64_t run_digest() const;
};

/// Canonical JSON of the config, used for digests and report metadata.
std::string config_json(const RunConfig& cfg);

/// Overlays the keys present in a JSON config document onto `cfg`.
void apply_config_json(RunConfig& cfg, const std::string& json_text);

struct EncodedExample {
  Digit label = 0;
  BitSequence bits;
  SymbolStream symbols;
  std::string source;
};

struct EncodedDataset {
  std::uint64_t digest = 0;
  std::vector<EncodedExample> examples;
  std::vector<std::string> dropped;  // sources removed as unfittable
};

/// Loads, subsamples and encodes the configured dataset. Dropped audio clips
/// are reported on `log`.
EncodedDataset encode_dataset(const RunConfig& cfg, std::ostream& log);

/// Binary cache: "RCBENC\0\x01", digest, count, then per example a label byte,
/// 1,024 symbol bytes, 128 packed bit bytes and the source name.
void write_encoded_cache(const std::filesystem::path& path, const EncodedDataset& data);
EncodedDataset read_encoded_cache(const std::filesystem::path& path);

std::filesystem::path encoded_cache_path(const RunConfig& cfg);

/// Returns the cached dataset when its digest matches, otherwise encodes and
/// (if caching is enabled) writes the cache.
EncodedDataset load_or_encode(const RunConfig& cfg, std::ostream& log);

/// Feature matrix for one method. Reservoir traces are cached on disk keyed by
/// (reservoir config, encoded dataset) digests unless caching is disabled.
FeatureMatrix method_features(const MethodSpec& method, const EncodedDataset& data, const RunConfig& cfg,
                              std::ostream& log);

ReservoirConfig reservoir_for(const RunConfig& cfg, double delay_ns);

/// All traces of a dataset, one row per example.
FeatureMatrix drive_all(const Reservoir& reservoir, const EncodedDataset& data, unsigned threads);

std::filesystem::path cmd_encode(const RunConfig& cfg, std::ostream& log);

/// Runs every configured method and writes report.json, report.txt and
/// folds.csv under cfg.out_dir.
ExperimentReport cmd_run(const RunConfig& cfg, std::ostream& log);

}  // namespace rcbench
