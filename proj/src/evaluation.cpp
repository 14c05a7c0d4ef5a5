#include "micol/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>

#include "micol/error.hpp"
#include "micol/jsonl.hpp"

namespace micol {
namespace {

double discount(std::size_t rank, DcgBase base) {
  const double x = static_cast<double>(rank + 1);
  return base == DcgBase::kTwo ? std::log2(x) : std::log(x);
}

// Inverse propensities of the true labels, largest first.
std::vector<double> ideal_rewards(const LabelSet& truth, const PropensityModel& pm) {
  std::vector<double> r;
  r.reserve(truth.size());
  for (const auto& l : truth) r.push_back(pm.inverse(l));
  std::sort(r.begin(), r.end(), std::greater<>());
  return r;
}

}  // namespace

void GroundTruth::add(const std::string& doc_id, LabelSet labels) {
  if (sets_.contains(doc_id)) throw ValidationError("duplicate ground-truth entry for \"" + doc_id + "\"");
  order_.push_back(doc_id);
  sets_.emplace(doc_id, std::move(labels));
}

const LabelSet* GroundTruth::find(const std::string& doc_id) const {
  auto it = sets_.find(doc_id);
  return it == sets_.end() ? nullptr : &it->second;
}

const LabelSet& GroundTruth::at(const std::string& doc_id) const {
  auto* s = find(doc_id);
  if (!s) throw LookupError("no ground truth for document \"" + doc_id + "\"");
  return *s;
}

std::unordered_map<std::string, std::size_t> GroundTruth::label_counts() const {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& [doc, labels] : sets_) {
    for (const auto& l : labels) ++counts[l];
  }
  return counts;
}

GroundTruth GroundTruth::read(std::istream& in, const std::string& source) {
  GroundTruth t;
  for_each_jsonl(in, source, [&](const json& obj, std::size_t line) {
    auto id = require_string(obj, "paper", source, line);
    auto labels = optional_string_list(obj, "label", source, line);
    t.add(id, LabelSet(labels.begin(), labels.end()));
  });
  return t;
}

GroundTruth GroundTruth::load(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read(in, path.string());
}

GroundTruth GroundTruth::from_documents(const std::vector<Document>& docs) {
  GroundTruth t;
  for (const auto& d : docs) {
    if (d.labels) t.add(d.id, LabelSet(d.labels->begin(), d.labels->end()));
  }
  return t;
}

double log_in(LogBase base, double x) {
  switch (base) {
    case LogBase::kNatural:
      return std::log(x);
    case LogBase::kTwo:
      return std::log2(x);
    case LogBase::kTen:
      return std::log10(x);
  }
  throw InvariantError("unknown log base");
}

PropensityModel PropensityModel::fit(const std::unordered_map<std::string, std::size_t>& train_freqs,
                                     std::size_t corpus_size, LogBase base, double a, double b) {
  if (corpus_size == 0 || log_in(base, static_cast<double>(corpus_size)) < 1.0) {
    throw ValidationError("training corpus of " + std::to_string(corpus_size) +
                          " documents is too small for the propensity model (needs log|D| >= 1)");
  }
  PropensityModel pm;
  pm.a_ = a;
  pm.b_ = b;
  pm.c_ = (log_in(base, static_cast<double>(corpus_size)) - 1.0) * std::pow(b + 1.0, a);
  for (const auto& [label, n] : train_freqs) pm.inv_[label] = pm.inverse_for_count(static_cast<double>(n));
  pm.fallback_ = pm.inverse_for_count(0.0);
  return pm;
}

PropensityModel PropensityModel::uniform() {
  PropensityModel pm;
  pm.c_ = 0.0;
  pm.fallback_ = 1.0;
  return pm;
}

PropensityModel PropensityModel::explicit_inverse(std::unordered_map<std::string, double> inv, double fallback) {
  for (const auto& [l, v] : inv) {
    if (!(v >= 1.0)) throw ValidationError("inverse propensity of \"" + l + "\" must be >= 1");
  }
  PropensityModel pm;
  pm.inv_ = std::move(inv);
  pm.fallback_ = fallback;
  return pm;
}

double PropensityModel::inverse(const std::string& label) const {
  auto it = inv_.find(label);
  return it == inv_.end() ? fallback_ : it->second;
}

double PropensityModel::inverse_for_count(double count) const {
  return 1.0 + c_ * std::pow(count + b_, -a_);
}

double precision_at_k(const RankedPrediction& pred, const LabelSet& truth, std::size_t k) {
  if (k == 0) throw ValidationError("k must be at least 1");
  std::size_t hits = 0;
  const auto n = std::min(k, pred.ranked.size());
  for (std::size_t i = 0; i < n; ++i) hits += truth.contains(pred.ranked[i].label) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

std::optional<double> ndcg_at_k(const RankedPrediction& pred, const LabelSet& truth, std::size_t k,
                                const MetricOptions& opts) {
  if (k == 0) throw ValidationError("k must be at least 1");
  if (truth.empty()) return std::nullopt;
  double dcg = 0.0;
  const auto n = std::min(k, pred.ranked.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (truth.contains(pred.ranked[i].label)) dcg += 1.0 / discount(i + 1, opts.dcg_base);
  }
  double ideal = 0.0;
  const auto m = std::min(k, truth.size());
  for (std::size_t i = 0; i < m; ++i) ideal += 1.0 / discount(i + 1, opts.dcg_base);
  return dcg / ideal;
}

std::optional<double> psp_at_k(const RankedPrediction& pred, const LabelSet& truth, const PropensityModel& pm,
                               std::size_t k) {
  if (k == 0) throw ValidationError("k must be at least 1");
  if (truth.empty()) return std::nullopt;
  double reward = 0.0;
  const auto n = std::min(k, pred.ranked.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (truth.contains(pred.ranked[i].label)) reward += pm.inverse(pred.ranked[i].label);
  }
  const auto ideal = ideal_rewards(truth, pm);
  const auto m = std::min(k, ideal.size());
  double best = 0.0;
  for (std::size_t i = 0; i < m; ++i) best += ideal[i];
  // (reward / k) / (best / m): the ideal ranking's mean reward per slot is
  // scaled to 1, so unit propensities reproduce precision exactly.
  return (reward * static_cast<double>(m)) / (best * static_cast<double>(k));
}

std::optional<double> psn_at_k(const RankedPrediction& pred, const LabelSet& truth, const PropensityModel& pm,
                               std::size_t k, const MetricOptions& opts) {
  if (k == 0) throw ValidationError("k must be at least 1");
  if (truth.empty()) return std::nullopt;
  double dcg = 0.0;
  const auto n = std::min(k, pred.ranked.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (truth.contains(pred.ranked[i].label)) {
      dcg += pm.inverse(pred.ranked[i].label) / discount(i + 1, opts.dcg_base);
    }
  }
  const auto ideal = ideal_rewards(truth, pm);
  const auto m = std::min(k, ideal.size());
  double best = 0.0;
  for (std::size_t i = 0; i < m; ++i) best += ideal[i] / discount(i + 1, opts.dcg_base);
  return dcg / best;
}

nlohmann::json MetricsReport::to_json() const {
  return {{"k", ks},
          {"P", p},
          {"NDCG", ndcg},
          {"PSP", psp},
          {"PSN", psn},
          {"psp1_over_p1", psp1_over_p1 ? nlohmann::json(*psp1_over_p1) : nlohmann::json(nullptr)},
          {"excluded_docs", excluded_docs}};
}

MetricsReport evaluate(const std::vector<RankedPrediction>& preds, const GroundTruth& truth,
                       const PropensityModel& pm, const std::vector<std::size_t>& ks, const MetricOptions& opts) {
  if (ks.empty()) throw ValidationError("at least one cutoff k is required");
  for (auto k : ks) {
    if (k == 0) throw ValidationError("k must be at least 1");
  }

  std::vector<std::string> offenders;
  std::unordered_set<std::string> seen;
  for (const auto& p : preds) {
    if (!truth.find(p.doc_id)) offenders.push_back(p.doc_id + " (no ground truth)");
    if (!seen.insert(p.doc_id).second) offenders.push_back(p.doc_id + " (duplicate prediction)");
  }
  for (const auto& id : truth.doc_ids()) {
    if (!seen.contains(id)) offenders.push_back(id + " (no prediction)");
  }
  if (!offenders.empty()) {
    std::string msg = "predictions and ground truth are not aligned: ";
    for (std::size_t i = 0; i < offenders.size() && i < 10; ++i) msg += (i ? ", " : "") + offenders[i];
    if (offenders.size() > 10) msg += ", ... (" + std::to_string(offenders.size()) + " total)";
    throw ValidationError(msg);
  }

  MetricsReport r;
  r.ks = ks;
  r.p.assign(ks.size(), 0.0);
  r.ndcg.assign(ks.size(), 0.0);
  r.psp.assign(ks.size(), 0.0);
  r.psn.assign(ks.size(), 0.0);
  std::size_t counted = 0;
  for (const auto& pred : preds) {
    const auto& t = truth.at(pred.doc_id);
    if (t.empty()) {
      ++r.excluded_docs;
      continue;
    }
    ++counted;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      r.p[i] += precision_at_k(pred, t, ks[i]);
      r.ndcg[i] += *ndcg_at_k(pred, t, ks[i], opts);
      r.psp[i] += *psp_at_k(pred, t, pm, ks[i]);
      r.psn[i] += *psn_at_k(pred, t, pm, ks[i], opts);
    }
  }
  if (counted > 0) {
    for (auto* v : {&r.p, &r.ndcg, &r.psp, &r.psn}) {
      for (auto& x : *v) x /= static_cast<double>(counted);
    }
  }
  auto one = std::find(ks.begin(), ks.end(), std::size_t{1});
  if (one != ks.end()) {
    const auto i = static_cast<std::size_t>(one - ks.begin());
    if (r.p[i] > 0.0) r.psp1_over_p1 = r.psp[i] / r.p[i];
  }
  return r;
}

}  // namespace micol
