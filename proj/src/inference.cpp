#include "micol/inference.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <thread>

#include "micol/error.hpp"
#include "micol/jsonl.hpp"

namespace micol {

BiEncoderReranker::BiEncoderReranker(const EncoderParams& params, const LabelSpace& labels,
                                     const TokenizerConfig& tok)
    : params_(&params) {
  label_vecs_.reserve(labels.size());
  for (const auto& l : labels.labels) label_vecs_.push_back(encode(params, label_text(l, tok)));
}

std::vector<double> BiEncoderReranker::score(TokenSpan doc_tokens, std::span<const std::size_t> candidates) const {
  const auto doc = encode(*params_, doc_tokens);
  std::vector<double> out;
  out.reserve(candidates.size());
  for (auto l : candidates) out.push_back(cosine(doc, label_vecs_.at(l)));
  return out;
}

CrossEncoderReranker::CrossEncoderReranker(const EncoderParams& params, const LabelSpace& labels,
                                           const TokenizerConfig& tok)
    : params_(&params) {
  label_ids_.reserve(labels.size());
  for (const auto& l : labels.labels) label_ids_.push_back(params.vocab.to_ids(label_text(l, tok), params.max_len));
}

std::vector<double> CrossEncoderReranker::score(TokenSpan doc_tokens, std::span<const std::size_t> candidates) const {
  const auto doc = params_->vocab.to_ids(doc_tokens, params_->max_len);
  std::vector<double> out;
  out.reserve(candidates.size());
  for (auto l : candidates) {
    out.push_back(dot(params_->weights.head, encode_ids(*params_, joint_ids(*params_, doc, label_ids_.at(l)))));
  }
  return out;
}

std::vector<double> Bm25Reranker::score(TokenSpan doc_tokens, std::span<const std::size_t> candidates) const {
  const auto all = index_->score_all(doc_tokens);
  std::vector<double> out;
  out.reserve(candidates.size());
  for (auto l : candidates) out.push_back(all.at(l));
  return out;
}

std::unique_ptr<Reranker> make_reranker(Arch arch, const EncoderParams& params, const LabelSpace& labels,
                                        const TokenizerConfig& tok) {
  if (arch == Arch::kBi) return std::make_unique<BiEncoderReranker>(params, labels, tok);
  return std::make_unique<CrossEncoderReranker>(params, labels, tok);
}

RankedPrediction rank_candidates(std::string doc_id, std::vector<std::pair<std::string, double>> scored,
                                 std::size_t k) {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  RankedPrediction p;
  p.doc_id = std::move(doc_id);
  p.k = k;
  p.shortfall = scored.size() < k ? k - scored.size() : 0;
  const auto keep = std::min(k, scored.size());
  p.ranked.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) p.ranked.push_back({std::move(scored[i].first), scored[i].second});
  return p;
}

Predictor::Predictor(const Retriever& retriever, const Reranker& reranker, PredictOptions opts)
    : retriever_(&retriever), reranker_(&reranker), opts_(opts) {
  if (opts_.k == 0) throw ValidationError("k must be at least 1");
  if (opts_.threads == 0) opts_.threads = 1;
}

RankedPrediction Predictor::predict(const Document& d) const {
  const auto tokens = tokenize(d.text, retriever_->index().tokenizer());
  const auto cands = retriever_->retrieve(d.id, tokens, opts_.eta);
  const auto scores = reranker_->score(tokens, cands.all);
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(cands.all.size());
  for (std::size_t i = 0; i < cands.all.size(); ++i) {
    if (!std::isfinite(scores[i])) throw InvariantError("non-finite reranker score for document \"" + d.id + "\"");
    scored.emplace_back(retriever_->labels().labels[cands.all[i]].id, scores[i]);
  }
  return rank_candidates(d.id, std::move(scored), opts_.k);
}

std::vector<RankedPrediction> Predictor::predict_batch(const std::vector<Document>& docs) const {
  std::vector<RankedPrediction> out(docs.size());
  const auto threads = std::min<std::size_t>(opts_.threads, std::max<std::size_t>(docs.size(), 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < docs.size(); ++i) out[i] = predict(docs[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < docs.size(); i += threads) out[i] = predict(docs[i]);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

nlohmann::json prediction_to_json(const RankedPrediction& p) {
  nlohmann::json ranked = nlohmann::json::array();
  for (const auto& r : p.ranked) ranked.push_back({{"label", r.label}, {"score", r.score}});
  return {{"paper", p.doc_id}, {"ranked", ranked}, {"shortfall", p.shortfall}};
}

RankedPrediction prediction_from_json(const nlohmann::json& j) {
  RankedPrediction p;
  p.doc_id = j.at("paper").get<std::string>();
  for (const auto& r : j.at("ranked")) p.ranked.push_back({r.at("label").get<std::string>(), r.at("score").get<double>()});
  p.shortfall = j.value("shortfall", std::size_t{0});
  p.k = p.ranked.size() + p.shortfall;
  return p;
}

void write_predictions(std::ostream& out, const std::vector<RankedPrediction>& preds) {
  for (const auto& p : preds) out << prediction_to_json(p).dump() << '\n';
}

void save_predictions(const std::filesystem::path& path, const std::vector<RankedPrediction>& preds) {
  auto out = open_output(path);
  write_predictions(out, preds);
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<RankedPrediction> read_predictions(std::istream& in, const std::string& source) {
  std::vector<RankedPrediction> preds;
  for_each_jsonl(in, source, [&](const json& obj, std::size_t line) {
    try {
      preds.push_back(prediction_from_json(obj));
    } catch (const json::exception& e) {
      throw ParseError(source, line, std::string("bad prediction record: ") + e.what());
    }
  });
  return preds;
}

std::vector<RankedPrediction> load_predictions(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_predictions(in, path.string());
}

}  // namespace micol
