#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "micol/inference.hpp"
#include <json.hpp>

namespace micol {

using LabelSet = std::unordered_set<std::string>;

/// Per-document relevant label sets, in file order.
class GroundTruth {
 public:
  void add(const std::string& doc_id, LabelSet labels);
  const LabelSet* find(const std::string& doc_id) const;
  const LabelSet& at(const std::string& doc_id) const;
  const std::vector<std::string>& doc_ids() const noexcept { return order_; }
  std::size_t size() const noexcept { return order_.size(); }
  /// Number of documents relevant to each label.
  std::unordered_map<std::string, std::size_t> label_counts() const;

  /// Reads document-style JSONL; only "paper" and "label" are consulted.
  static GroundTruth read(std::istream& in, const std::string& source = "<stream>");
  static GroundTruth load(const std::filesystem::path& path);
  static GroundTruth from_documents(const std::vector<Document>& docs);

 private:
  std::unordered_map<std::string, LabelSet> sets_;
  std::vector<std::string> order_;
};

enum class LogBase { kNatural, kTwo, kTen };
double log_in(LogBase base, double x);

/// Inverse propensity 1/p_l = 1 + C (N_l + B)^(-A), with
/// C = (log|D| - 1)(B + 1)^A.
class PropensityModel {
 public:
  static constexpr double kA = 0.55;
  static constexpr double kB = 1.5;

  /// Throws ValidationError when log|D| < 1 (the propensity would exceed 1).
  static PropensityModel fit(const std::unordered_map<std::string, std::size_t>& train_freqs,
                             std::size_t corpus_size, LogBase base = LogBase::kNatural,
                             double a = kA, double b = kB);
  /// Every label gets propensity 1.
  static PropensityModel uniform();
  /// Explicit inverse propensities; labels not listed get `fallback`.
  static PropensityModel explicit_inverse(std::unordered_map<std::string, double> inv,
                                          double fallback);

  double c() const noexcept { return c_; }
  double inverse(const std::string& label) const;
  double propensity(const std::string& label) const { return 1.0 / inverse(label); }
  /// 1/p for a label seen `count` times in training.
  double inverse_for_count(double count) const;

 private:
  double a_ = kA;
  double b_ = kB;
  double c_ = 0.0;
  std::unordered_map<std::string, double> inv_;
  double fallback_ = 1.0;
};

enum class DcgBase { kTwo, kNatural };

struct MetricOptions {
  DcgBase dcg_base = DcgBase::kTwo;
};

/// Fraction of the first k slots holding relevant labels; slots past the end
/// of the ranking count as misses.
double precision_at_k(const RankedPrediction& pred, const LabelSet& truth, std::size_t k);
/// nullopt when `truth` is empty.
std::optional<double> ndcg_at_k(const RankedPrediction& pred, const LabelSet& truth, std::size_t k,
                                const MetricOptions& opts = {});
/// Propensity-scored precision, rescaled by the ideal ranking's mean reward
/// per occupied slot. nullopt when `truth` is empty.
std::optional<double> psp_at_k(const RankedPrediction& pred, const LabelSet& truth,
                               const PropensityModel& pm, std::size_t k);
/// Propensity-scored DCG divided by the DCG of the ideal ranking (true labels
/// by descending 1/p). nullopt when `truth` is empty.
std::optional<double> psn_at_k(const RankedPrediction& pred, const LabelSet& truth,
                               const PropensityModel& pm, std::size_t k,
                               const MetricOptions& opts = {});

struct MetricsReport {
  std::vector<std::size_t> ks;
  std::vector<double> p;
  std::vector<double> ndcg;
  std::vector<double> psp;
  std::vector<double> psn;
  std::optional<double> psp1_over_p1;
  std::size_t excluded_docs = 0;

  nlohmann::json to_json() const;
};

/// Means over documents. Predictions and truth must cover the same ids;
/// otherwise ValidationError lists the offenders.
MetricsReport evaluate(const std::vector<RankedPrediction>& preds, const GroundTruth& truth,
                       const PropensityModel& pm, const std::vector<std::size_t>& ks = {1, 3, 5},
                       const MetricOptions& opts = {});

}  // namespace micol
