#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "micol/corpus.hpp"
#include "micol/encoder.hpp"
#include "micol/retrieval.hpp"
#include "micol/training.hpp"
#include <json.hpp>

namespace micol {

/// Second-stage scorer of (document, candidate label) pairs.
class Reranker {
 public:
  virtual ~Reranker() = default;
  /// One score per entry of `candidates` (label indices).
  virtual std::vector<double> score(TokenSpan doc_tokens,
                                    std::span<const std::size_t> candidates) const = 0;
};

/// Cosine between separately encoded document and label text. Label
/// encodings are computed once at construction.
class BiEncoderReranker final : public Reranker {
 public:
  BiEncoderReranker(const EncoderParams& params, const LabelSpace& labels,
                    const TokenizerConfig& tok = {});
  std::vector<double> score(TokenSpan doc_tokens,
                            std::span<const std::size_t> candidates) const override;

 private:
  const EncoderParams* params_;
  std::vector<EncodedVec> label_vecs_;
};

/// Linear head over the joint encoding of document ‖ label text.
class CrossEncoderReranker final : public Reranker {
 public:
  CrossEncoderReranker(const EncoderParams& params, const LabelSpace& labels,
                       const TokenizerConfig& tok = {});
  std::vector<double> score(TokenSpan doc_tokens,
                            std::span<const std::size_t> candidates) const override;

 private:
  const EncoderParams* params_;
  std::vector<TokenIds> label_ids_;
};

/// Keeps the first-stage BM25 scores; the lexical baseline.
class Bm25Reranker final : public Reranker {
 public:
  explicit Bm25Reranker(const Bm25Index& index) : index_(&index) {}
  std::vector<double> score(TokenSpan doc_tokens,
                            std::span<const std::size_t> candidates) const override;

 private:
  const Bm25Index* index_;
};

std::unique_ptr<Reranker> make_reranker(Arch arch, const EncoderParams& params,
                                        const LabelSpace& labels, const TokenizerConfig& tok = {});

struct RankedLabel {
  std::string label;
  double score;
  bool operator==(const RankedLabel&) const = default;
};

struct RankedPrediction {
  std::string doc_id;
  std::vector<RankedLabel> ranked;  // non-increasing score, ties by label id
  std::size_t k = 0;
  /// k minus the number of candidates, when positive.
  std::size_t shortfall = 0;

  bool operator==(const RankedPrediction&) const = default;
};

struct PredictOptions {
  std::size_t k = 5;
  double eta = kDefaultEta;
  std::size_t threads = 1;
};

/// Retrieve-then-rerank over one label space.
class Predictor {
 public:
  Predictor(const Retriever& retriever, const Reranker& reranker, PredictOptions opts);

  RankedPrediction predict(const Document& d) const;
  /// Element-wise predict; output order follows `docs`.
  std::vector<RankedPrediction> predict_batch(const std::vector<Document>& docs) const;

 private:
  const Retriever* retriever_;
  const Reranker* reranker_;
  PredictOptions opts_;
};

/// Sorts by descending score, ascending label id on ties, and keeps the top k.
RankedPrediction rank_candidates(std::string doc_id,
                                 std::vector<std::pair<std::string, double>> scored,
                                 std::size_t k);

nlohmann::json prediction_to_json(const RankedPrediction& p);
RankedPrediction prediction_from_json(const nlohmann::json& j);
void write_predictions(std::ostream& out, const std::vector<RankedPrediction>& preds);
void save_predictions(const std::filesystem::path& path, const std::vector<RankedPrediction>& preds);
std::vector<RankedPrediction> read_predictions(std::istream& in, const std::string& source = "<stream>");
std::vector<RankedPrediction> load_predictions(const std::filesystem::path& path);

}  // namespace micol
