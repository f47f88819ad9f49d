#include "rcbench/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "json.hpp"

#include "rcbench/error.hpp"
#include "rcbench/parallel.hpp"
#include "rcbench/rng.hpp"

namespace rcbench {
namespace {

void require_pair(std::span<const Digit> pred, std::span<const Digit> truth) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(pred.size()) + " predictions vs " + std::to_string(truth.size()) + " labels");
  }
  if (truth.empty()) throw Error(ErrorCode::Empty, "no predictions to score");
}

struct ClassCounts {
  std::array<std::size_t, kNumClasses> tp{};
  std::array<std::size_t, kNumClasses> fp{};
  std::array<std::size_t, kNumClasses> fn{};
  std::array<std::size_t, kNumClasses> support{};
};

ClassCounts count_classes(std::span<const Digit> pred, std::span<const Digit> truth) {
  ClassCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= kNumClasses || pred[i] >= kNumClasses) throw Error(ErrorCode::InvalidLabel, "label out of range");
    ++c.support[truth[i]];
    if (pred[i] == truth[i]) {
      ++c.tp[truth[i]];
    } else {
      ++c.fp[pred[i]];
      ++c.fn[truth[i]];
    }
  }
  return c;
}

// 2PR / (P + R), written as 2TP / (2TP + FP + FN); 0 when undefined.
double f1_of(const ClassCounts& c, int k) {
  const double denom = 2.0 * static_cast<double>(c.tp[k]) + static_cast<double>(c.fp[k] + c.fn[k]);
  return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(c.tp[k]) / denom;
}

std::array<std::vector<std::size_t>, kNumClasses> members_by_class(std::span<const Digit> labels) {
  std::array<std::vector<std::size_t>, kNumClasses> members;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= kNumClasses) throw Error(ErrorCode::InvalidLabel, "label " + std::to_string(labels[i]));
    members[labels[i]].push_back(i);
  }
  return members;
}

FeatureMatrix gather_rows(const FeatureMatrix& features, const std::vector<std::size_t>& rows) {
  FeatureMatrix out(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

std::string percent_cell(const FoldStats& s) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.1f (sigma=%.1f)", s.mean, s.std);
  return buf;
}

}  // namespace

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t a : assignments) ++sizes[a];
  return sizes;
}

FoldPlan kfold_plan(std::span<const Digit> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2 || labels.size() < k) {
    throw Error(ErrorCode::TooFewSamples,
                std::to_string(labels.size()) + " examples cannot be split into " + std::to_string(k) + " folds");
  }
  auto members = members_by_class(labels);
  for (int c = 0; c < kNumClasses; ++c) {
    if (!members[c].empty() && members[c].size() < k) {
      throw Error(ErrorCode::TooFewSamples, "class " + std::to_string(c) + " has " +
                                                std::to_string(members[c].size()) + " examples, fewer than " +
                                                std::to_string(k) + " folds");
    }
  }
  FoldPlan plan{k, std::vector<std::size_t>(labels.size(), 0)};
  Rng rng(seed);
  std::size_t position = 0;
  for (auto& m : members) {
    rng.shuffle(std::span(m));
    for (std::size_t idx : m) plan.assignments[idx] = position++ % k;
  }
  return plan;
}

std::vector<Split> kfold_splits(const FoldPlan& plan) {
  std::vector<Split> splits;
  splits.reserve(plan.k);
  for (std::size_t f = 0; f < plan.k; ++f) splits.push_back({plan.train_indices(f), plan.test_indices(f)});
  return splits;
}

std::vector<Split> repeated_holdout(std::span<const Digit> labels, std::size_t repeats, double test_fraction,
                                    std::uint64_t seed) {
  if (repeats == 0 || !(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidParams, "repeats >= 1 and test_fraction in (0, 1) required");
  }
  const auto members = members_by_class(labels);
  std::vector<Split> splits;
  splits.reserve(repeats);
  for (std::size_t r = 0; r < repeats; ++r) {
    Rng rng(splitmix64(seed + r));
    Split split;
    for (auto m : members) {
      rng.shuffle(std::span(m));
      const auto n_test = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(m.size())));
      split.test.insert(split.test.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(n_test));
      split.train.insert(split.train.end(), m.begin() + static_cast<std::ptrdiff_t>(n_test), m.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    if (split.test.empty() || split.train.empty()) throw Error(ErrorCode::TooFewSamples, "holdout split left a side empty");
    splits.push_back(std::move(split));
  }
  return splits;
}

double accuracy(std::span<const Digit> pred, std::span<const Digit> truth) {
  require_pair(pred, truth);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += pred[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double macro_f1(std::span<const Digit> pred, std::span<const Digit> truth) {
  require_pair(pred, truth);
  const ClassCounts counts = count_classes(pred, truth);
  double sum = 0.0;
  int present = 0;
  for (int k = 0; k < kNumClasses; ++k) {
    if (counts.support[k] == 0) continue;
    sum += f1_of(counts, k);
    ++present;
  }
  return sum / present;
}

double weighted_f1(std::span<const Digit> pred, std::span<const Digit> truth) {
  require_pair(pred, truth);
  const ClassCounts counts = count_classes(pred, truth);
  double sum = 0.0;
  for (int k = 0; k < kNumClasses; ++k) sum += static_cast<double>(counts.support[k]) * f1_of(counts, k);
  return sum / static_cast<double>(truth.size());
}

FoldStats fold_stats(std::span<const double> fractions) {
  if (fractions.empty()) throw Error(ErrorCode::Empty, "no fold values");
  const double n = static_cast<double>(fractions.size());
  const double mean = std::accumulate(fractions.begin(), fractions.end(), 0.0) / n;
  double ss = 0.0;
  for (double f : fractions) ss += (f - mean) * (f - mean);
  const double std = fractions.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {100.0 * mean, 100.0 * std};
}

MethodResult evaluate_features(const std::string& method, const std::string& group, const FeatureMatrix& features,
                               std::span<const Digit> labels, std::span<const Split> splits, const TrainConfig& cfg,
                               F1Average average, unsigned threads) {
  if (features.rows() == 0 || static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature rows must match labels and be nonempty");
  }
  if (splits.empty()) throw Error(ErrorCode::Empty, "no splits to evaluate");
  MethodResult result{method, group, std::vector<double>(splits.size()), std::vector<double>(splits.size()), {}, {}};
  parallel_for(splits.size(), threads, [&](std::size_t f) {
    const Split& split = splits[f];
    std::vector<Digit> train_labels;
    std::vector<Digit> test_labels;
    for (std::size_t i : split.train) train_labels.push_back(labels[i]);
    for (std::size_t i : split.test) test_labels.push_back(labels[i]);
    const ReadoutModel model = train_ovr(gather_rows(features, split.train), train_labels, cfg);
    const auto pred = predict_all(model, gather_rows(features, split.test));
    result.fold_accuracy[f] = accuracy(pred, test_labels);
    result.fold_f1[f] = average == F1Average::Macro ? macro_f1(pred, test_labels) : weighted_f1(pred, test_labels);
  });
  result.accuracy = fold_stats(result.fold_accuracy);
  result.f1 = fold_stats(result.fold_f1);
  return result;
}

std::string report_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["format"] = "rcbench-report";
  j["version"] = 1;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.metadata) meta[key] = value;
  j["metadata"] = std::move(meta);
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json r;
    r["method"] = row.method;
    r["group"] = row.group;
    r["accuracy"] = {{"mean", row.accuracy.mean}, {"std", row.accuracy.std}};
    r["f1"] = {{"mean", row.f1.mean}, {"std", row.f1.std}};
    r["fold_accuracy"] = row.fold_accuracy;
    r["fold_f1"] = row.fold_f1;
    j["rows"].push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

std::string report_text(const ExperimentReport& report) {
  std::string out;
  for (const auto& [key, value] : report.metadata) out += key + ": " + value + "\n";
  out += "\n";
  std::size_t width = std::string("Method").size();
  for (const auto& row : report.rows) width = std::max(width, row.method.size());
  char line[256];
  std::snprintf(line, sizeof line, "%-*s  %-22s  %-22s\n", static_cast<int>(width), "Method", "Test Accuracy (%)",
                "Test F1 (%)");
  out += line;
  const struct {
    const char* group;
    const char* title;
  } sections[] = {{"reservoir", "Results from the simulated reservoir"},
                  {"baseline", "Comparable methods on same dataset"}};
  for (const auto& section : sections) {
    const bool any = std::any_of(report.rows.begin(), report.rows.end(),
                                 [&](const MethodResult& r) { return r.group == section.group; });
    if (!any) continue;
    out += std::string(section.title) + "\n";
    for (const auto& row : report.rows) {
      if (row.group != section.group) continue;
      std::snprintf(line, sizeof line, "%-*s  %-22s  %-22s\n", static_cast<int>(width), row.method.c_str(),
                    percent_cell(row.accuracy).c_str(), percent_cell(row.f1).c_str());
      out += line;
    }
  }
  return out;
}

std::string report_fold_csv(const ExperimentReport& report) {
  std::string out = "method,fold,accuracy,f1\n";
  char line[128];
  for (const auto& row : report.rows) {
    for (std::size_t f = 0; f < row.fold_accuracy.size(); ++f) {
      std::snprintf(line, sizeof line, "%s,%zu,%.17g,%.17g\n", row.method.c_str(), f, row.fold_accuracy[f],
                    row.fold_f1[f]);
      out += line;
    }
  }
  return out;
}

}  // namespace rcbench
