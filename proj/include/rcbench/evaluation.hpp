#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rcbench/datasets.hpp"
#include "rcbench/readout.hpp"

namespace rcbench {

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;  // fold index per example

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

/// Stratified plan: each class is shuffled, then dealt round-robin. The deal
/// position carries over from one class to the next, so total fold sizes
/// differ by at most one.
FoldPlan kfold_plan(std::span<const Digit> labels, std::size_t k, std::uint64_t seed);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

std::vector<Split> kfold_splits(const FoldPlan& plan);

/// `repeats` independent stratified holdout splits; each class contributes
/// round(test_fraction * class size) test examples.
std::vector<Split> repeated_holdout(std::span<const Digit> labels, std::size_t repeats, double test_fraction,
                                    std::uint64_t seed);

double accuracy(std::span<const Digit> pred, std::span<const Digit> truth);

/// Unweighted mean of per-class F1 over the classes present in `truth`.
double macro_f1(std::span<const Digit> pred, std::span<const Digit> truth);

/// Per-class F1 weighted by the class's support in `truth`.
double weighted_f1(std::span<const Digit> pred, std::span<const Digit> truth);

/// Mean and sample (n - 1) standard deviation, both in percent.
struct FoldStats {
  double mean = 0.0;
  double std = 0.0;
};
FoldStats fold_stats(std::span<const double> fractions);

enum class F1Average { Macro, Weighted };

struct MethodResult {
  std::string method;
  std::string group;  // "reservoir" or "baseline"
  std::vector<double> fold_accuracy;  // fractions
  std::vector<double> fold_f1;
  FoldStats accuracy;
  FoldStats f1;
};

/// Trains the readout on each split's train side and scores its test side.
/// Every method goes through this function; only `features` differs.
MethodResult evaluate_features(const std::string& method, const std::string& group, const FeatureMatrix& features,
                               std::span<const Digit> labels, std::span<const Split> splits, const TrainConfig& cfg,
                               F1Average average = F1Average::Macro, unsigned threads = 1);

struct ExperimentReport {
  std::map<std::string, std::string> metadata;  // dataset, samples, seed, config digest, ...
  std::vector<MethodResult> rows;
};

std::string report_json(const ExperimentReport& report);
std::string report_text(const ExperimentReport& report);
std::string report_fold_csv(const ExperimentReport& report);

}  // namespace rcbench
