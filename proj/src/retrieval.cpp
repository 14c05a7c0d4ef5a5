#include "micol/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "micol/error.hpp"

namespace micol {
namespace {

std::vector<std::string> distinct_sorted(TokenSpan tokens) {
  std::vector<std::string> out(tokens.begin(), tokens.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

Bm25Index Bm25Index::build(const LabelSpace& labels, const TokenizerConfig& tok, const Bm25Params& params) {
  if (labels.size() == 0) throw ValidationError("cannot build a BM25 index over an empty label space");
  Bm25Index idx;
  idx.params_ = params;
  idx.tokenizer_ = tok;
  idx.lengths_.reserve(labels.size());
  double total = 0.0;
  for (std::size_t l = 0; l < labels.size(); ++l) {
    auto text = label_text(labels.labels[l], tok);
    idx.lengths_.push_back(text.size());
    total += static_cast<double>(text.size());
    std::sort(text.begin(), text.end());
    for (std::size_t i = 0; i < text.size();) {
      std::size_t j = i;
      while (j < text.size() && text[j] == text[i]) ++j;
      idx.terms_[text[i]].postings.push_back({l, j - i});
      i = j;
    }
  }
  idx.avgdl_ = total / static_cast<double>(labels.size());
  const auto n = static_cast<double>(labels.size());
  for (auto& [token, term] : idx.terms_) {
    const auto df = static_cast<double>(term.postings.size());
    term.idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
  }
  return idx;
}

std::size_t Bm25Index::doc_freq(const std::string& token) const {
  auto it = terms_.find(token);
  return it == terms_.end() ? 0 : it->second.postings.size();
}

double Bm25Index::idf(const std::string& token) const {
  auto it = terms_.find(token);
  return it == terms_.end() ? 0.0 : it->second.idf;
}

std::size_t Bm25Index::term_freq(const std::string& token, std::size_t label) const {
  auto it = terms_.find(token);
  if (it == terms_.end()) return 0;
  const auto& ps = it->second.postings;
  auto p = std::lower_bound(ps.begin(), ps.end(), label,
                            [](const Posting& x, std::size_t l) { return x.label < l; });
  return (p != ps.end() && p->label == label) ? p->tf : 0;
}

double Bm25Index::term_weight(const TermEntry& term, std::size_t tf, std::size_t label) const {
  const double f = static_cast<double>(tf);
  const double len = params_.length_norm == LengthNorm::kLabelLength
                         ? static_cast<double>(lengths_[label])
                         : static_cast<double>(lengths_.size());
  const double norm = 1.0 - params_.b + params_.b * len / avgdl_;
  return term.idf * f * (params_.k1 + 1.0) / (f + params_.k1 * norm);
}

double Bm25Index::score(TokenSpan doc_tokens, std::size_t label) const {
  if (label >= lengths_.size()) throw LookupError("label index out of range");
  double s = 0.0;
  for (const auto& w : distinct_sorted(doc_tokens)) {
    auto it = terms_.find(w);
    if (it == terms_.end()) continue;
    const auto tf = term_freq(w, label);
    if (tf > 0) s += term_weight(it->second, tf, label);
  }
  return s;
}

std::vector<double> Bm25Index::score_all(TokenSpan doc_tokens) const {
  std::vector<double> scores(lengths_.size(), 0.0);
  for (const auto& w : distinct_sorted(doc_tokens)) {
    auto it = terms_.find(w);
    if (it == terms_.end()) continue;
    for (const auto& p : it->second.postings) scores[p.label] += term_weight(it->second, p.tf, p.label);
  }
  return scores;
}

NameMatcher::NameMatcher(const LabelSpace& labels, const TokenizerConfig& tok)
    : num_labels_(labels.size()) {
  for (std::size_t l = 0; l < labels.size(); ++l) {
    for (const auto& name : labels.labels[l].names) {
      auto t = tokenize(name, tok);
      if (t.empty()) continue;
      auto first = t.front();
      by_first_token_[first].push_back({l, std::move(t)});
    }
  }
}

std::vector<std::size_t> NameMatcher::match(TokenSpan doc) const {
  std::vector<bool> hit(num_labels_, false);
  for (std::size_t i = 0; i < doc.size(); ++i) {
    auto it = by_first_token_.find(doc[i]);
    if (it == by_first_token_.end()) continue;
    for (const auto& name : it->second) {
      if (hit[name.label] || name.tokens.size() > doc.size() - i) continue;
      if (std::equal(name.tokens.begin(), name.tokens.end(), doc.begin() + static_cast<std::ptrdiff_t>(i))) {
        hit[name.label] = true;
      }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < hit.size(); ++l) {
    if (hit[l]) out.push_back(l);
  }
  return out;
}

std::vector<std::string> exact_match(const Document& d, const LabelSpace& labels, const TokenizerConfig& tok) {
  NameMatcher matcher(labels, tok);
  std::vector<std::string> out;
  for (auto l : matcher.match(tokenize(d.text, tok))) out.push_back(labels.labels[l].id);
  return out;
}

double bm25_score(const Bm25Index& idx, const Document& d, std::size_t label) {
  return idx.score(tokenize(d.text, idx.tokenizer()), label);
}

Retriever::Retriever(const LabelSpace& labels, const TokenizerConfig& tok, const Bm25Params& params)
    : labels_(&labels), index_(Bm25Index::build(labels, tok, params)), matcher_(labels, tok) {}

CandidateSet Retriever::retrieve(const std::string& doc_id, TokenSpan doc_tokens, double eta) const {
  if (std::isnan(eta)) throw ValidationError("eta must not be NaN");
  CandidateSet c;
  c.doc_id = doc_id;
  c.exact = matcher_.match(doc_tokens);
  const auto scores = index_.score_all(doc_tokens);
  for (std::size_t l = 0; l < scores.size(); ++l) {
    if (scores[l] > eta) c.bm25.emplace_back(l, scores[l]);
  }
  std::vector<std::size_t> bm25_labels;
  bm25_labels.reserve(c.bm25.size());
  for (const auto& [l, s] : c.bm25) bm25_labels.push_back(l);
  std::set_union(c.exact.begin(), c.exact.end(), bm25_labels.begin(), bm25_labels.end(),
                 std::back_inserter(c.all));
  return c;
}

CandidateSet Retriever::retrieve(const Document& d, double eta) const {
  return retrieve(d.id, tokenize(d.text, index_.tokenizer()), eta);
}

nlohmann::json candidates_to_json(const CandidateSet& c, const LabelSpace& labels) {
  nlohmann::json exact = nlohmann::json::array();
  for (auto l : c.exact) exact.push_back(labels.labels[l].id);
  nlohmann::json bm25 = nlohmann::json::array();
  for (const auto& [l, s] : c.bm25) bm25.push_back({{"label", labels.labels[l].id}, {"score", s}});
  return {{"paper", c.doc_id}, {"exact", exact}, {"bm25", bm25}};
}

}  // namespace micol
