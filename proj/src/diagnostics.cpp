#include "micol/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <iterator>
#include <thread>
#include <unordered_map>

#include "micol/error.hpp"

namespace micol {
namespace {

// Documents of the labeled subset, indexed by label.
class OverlapIndex {
 public:
  OverlapIndex(const Hin& h, const GroundTruth& truth) : in_subset_(h.num_papers(), false) {
    for (const auto& id : truth.doc_ids()) {
      auto d = h.find(id);
      if (!d || truth.at(id).empty()) continue;
      in_subset_[*d] = true;
      ++subset_size_;
      for (const auto& l : truth.at(id)) by_label_[l].push_back(*d);
    }
    for (auto& [l, docs] : by_label_) std::sort(docs.begin(), docs.end());
  }

  bool in_subset(DocIndex d) const { return in_subset_[d]; }
  std::size_t subset_size() const { return subset_size_; }

  // Documents other than `d` sharing at least one of `labels`.
  std::vector<DocIndex> overlapping(DocIndex d, const LabelSet& labels) const {
    std::vector<DocIndex> out;
    for (const auto& l : labels) {
      auto it = by_label_.find(l);
      if (it == by_label_.end()) continue;
      out.insert(out.end(), it->second.begin(), it->second.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    std::erase(out, d);
    return out;
  }

 private:
  std::vector<bool> in_subset_;
  std::size_t subset_size_ = 0;
  std::unordered_map<std::string, std::vector<DocIndex>> by_label_;
};

JsTerms js_terms(const Hin& h, const GroundTruth& truth, const OverlapIndex& index, DocIndex d, MetaPattern m) {
  const auto* labels = truth.find(h.paper_id(d));
  if (!labels || labels->empty()) {
    throw PreconditionError("document \"" + h.paper_id(d) + "\" has no ground-truth labels");
  }
  auto hood = neighbors(h, d, m);
  std::erase_if(hood, [&](DocIndex p) { return !index.in_subset(p); });
  const auto overlap = index.overlapping(d, *labels);
  JsTerms t;
  t.x = hood.size();
  t.y = overlap.size();
  std::vector<DocIndex> shared;
  std::set_intersection(hood.begin(), hood.end(), overlap.begin(), overlap.end(), std::back_inserter(shared));
  t.overlap = shared.size();
  t.js = js_closed_form(t.x, t.y, t.overlap);
  return t;
}

}  // namespace

std::optional<double> js_closed_form(std::size_t x, std::size_t y, std::size_t shared) {
  if (x == 0 || y == 0) return std::nullopt;
  if (shared > x || shared > y) throw ValidationError("shared count exceeds a support size");
  const double X = static_cast<double>(x);
  const double Y = static_cast<double>(y);
  const double only_x = static_cast<double>(x - shared);
  const double only_y = static_cast<double>(y - shared);
  const double js = 0.5 * std::log(2.0 * X / (X + Y)) + 0.5 * only_x / X * std::log1p(X / Y) +
                    0.5 * std::log(2.0 * Y / (X + Y)) + 0.5 * only_y / Y * std::log1p(Y / X);
  // Identical supports can round to a hair below zero.
  return std::clamp(js, 0.0, std::numbers::ln2);
}

JsTerms js_divergence(const Hin& h, const GroundTruth& truth, DocIndex d, MetaPattern m) {
  if (d >= h.num_papers()) throw LookupError("document index out of range");
  OverlapIndex index(h, truth);
  return js_terms(h, truth, index, d, m);
}

nlohmann::json JsReport::to_json() const {
  nlohmann::json pats = nlohmann::json::array();
  for (const auto& p : patterns) {
    nlohmann::json docs = nlohmann::json::array();
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
      const auto& r = p.rows[i];
      docs.push_back({{"paper", p.doc_ids[i]},
                      {"X", r.x},
                      {"Y", r.y},
                      {"overlap", r.overlap},
                      {"js", r.js ? nlohmann::json(*r.js) : nlohmann::json(nullptr)}});
    }
    pats.push_back({{"pattern", pattern_name(p.pattern)},
                    {"mean_js", p.mean_js ? nlohmann::json(*p.mean_js) : nlohmann::json(nullptr)},
                    {"defined", p.rows.size() - p.skipped},
                    {"skipped", p.skipped},
                    {"docs", docs}});
  }
  return {{"subset_size", subset_size}, {"patterns", pats}};
}

JsReport diagnose(const Hin& h, const GroundTruth& truth, const std::vector<MetaPattern>& patterns,
                  std::size_t threads) {
  OverlapIndex index(h, truth);
  std::vector<DocIndex> docs;
  for (const auto& id : truth.doc_ids()) {
    auto d = h.find(id);
    if (d && !truth.at(id).empty()) docs.push_back(*d);
  }
  JsReport report;
  report.subset_size = index.subset_size();
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(docs.size(), 1));

  for (auto m : patterns) {
    PatternDiagnosis diag;
    diag.pattern = m;
    diag.rows.resize(docs.size());
    auto work = [&](std::size_t t) {
      for (std::size_t i = t; i < docs.size(); i += threads) diag.rows[i] = js_terms(h, truth, index, docs[i], m);
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }
    double sum = 0.0;
    std::size_t defined = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      diag.doc_ids.push_back(h.paper_id(docs[i]));
      if (diag.rows[i].js) {
        sum += *diag.rows[i].js;
        ++defined;
      } else {
        ++diag.skipped;
      }
    }
    if (defined > 0) diag.mean_js = sum / static_cast<double>(defined);
    report.patterns.push_back(std::move(diag));
  }
  std::stable_sort(report.patterns.begin(), report.patterns.end(), [](const auto& a, const auto& b) {
    if (a.mean_js.has_value() != b.mean_js.has_value()) return a.mean_js.has_value();
    return a.mean_js && *a.mean_js < *b.mean_js;
  });
  return report;
}

}  // namespace micol
