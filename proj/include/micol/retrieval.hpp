#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "micol/corpus.hpp"
#include <json.hpp>

namespace micol {

/// Length normalisation inside the BM25 term weight. The standard form
/// divides each label's own length by the mean; the literal form uses the
/// label count in place of the label length, making the normaliser the same
/// for every label. Kept for comparison only.
enum class LengthNorm { kLabelLength, kLabelCount };

struct Bm25Params {
  double k1 = 1.5;
  double b = 0.75;
  LengthNorm length_norm = LengthNorm::kLabelLength;
};

/// BM25 over label texts, where labels are the ranked items and documents
/// are the queries.
class Bm25Index {
 public:
  /// Throws ValidationError for an empty label space.
  static Bm25Index build(const LabelSpace& labels, const TokenizerConfig& tok = {},
                         const Bm25Params& params = {});

  std::size_t num_labels() const noexcept { return lengths_.size(); }
  double avgdl() const noexcept { return avgdl_; }
  const Bm25Params& params() const noexcept { return params_; }
  const TokenizerConfig& tokenizer() const noexcept { return tokenizer_; }

  /// Number of label texts containing `token` (0 when unseen).
  std::size_t doc_freq(const std::string& token) const;
  /// ln((N - n + 0.5) / (n + 0.5) + 1); 0 for unseen tokens.
  double idf(const std::string& token) const;
  std::size_t term_freq(const std::string& token, std::size_t label) const;
  std::size_t label_length(std::size_t label) const { return lengths_.at(label); }

  /// Score of one label against a tokenized document. Each distinct document
  /// token contributes at most once.
  double score(TokenSpan doc_tokens, std::size_t label) const;
  /// Scores for every label, through the inverted postings.
  std::vector<double> score_all(TokenSpan doc_tokens) const;

 private:
  struct Posting {
    std::size_t label;
    std::size_t tf;
  };
  struct TermEntry {
    double idf = 0.0;
    std::vector<Posting> postings;  // ascending label
  };

  double term_weight(const TermEntry& term, std::size_t tf, std::size_t label) const;

  Bm25Params params_;
  TokenizerConfig tokenizer_;
  std::vector<std::size_t> lengths_;
  double avgdl_ = 0.0;
  std::unordered_map<std::string, TermEntry> terms_;
};

/// Finds labels whose names occur as contiguous token runs in a document.
class NameMatcher {
 public:
  NameMatcher(const LabelSpace& labels, const TokenizerConfig& tok = {});
  /// Label indices (ascending) with at least one matching name.
  std::vector<std::size_t> match(TokenSpan doc_tokens) const;

 private:
  struct Name {
    std::size_t label;
    Tokens tokens;
  };
  std::unordered_map<std::string, std::vector<Name>> by_first_token_;
  std::size_t num_labels_ = 0;
};

/// Label ids whose ANY name appears in the document text.
std::vector<std::string> exact_match(const Document& d, const LabelSpace& labels,
                                     const TokenizerConfig& tok = {});

double bm25_score(const Bm25Index& idx, const Document& d, std::size_t label);

struct CandidateSet {
  std::string doc_id;
  std::vector<std::size_t> exact;                       // ascending label index
  std::vector<std::pair<std::size_t, double>> bm25;     // ascending label index, score > eta
  std::vector<std::size_t> all;                         // exact ∪ bm25, ascending
};

inline constexpr double kDefaultEta = 400.0;

/// Candidate generation for one tokenized document.
class Retriever {
 public:
  Retriever(const LabelSpace& labels, const TokenizerConfig& tok = {},
            const Bm25Params& params = {});

  CandidateSet retrieve(const std::string& doc_id, TokenSpan doc_tokens, double eta) const;
  CandidateSet retrieve(const Document& d, double eta) const;

  const Bm25Index& index() const noexcept { return index_; }
  const LabelSpace& labels() const noexcept { return *labels_; }

 private:
  const LabelSpace* labels_;
  Bm25Index index_;
  NameMatcher matcher_;
};

/// Candidate dump line: {"paper", "exact": [...], "bm25": [{"label", "score"}]}.
nlohmann::json candidates_to_json(const CandidateSet& c, const LabelSpace& labels);

}  // namespace micol
