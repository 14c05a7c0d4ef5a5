#include "micol/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "micol/error.hpp"

namespace micol {

Vocabulary::Vocabulary() : tokens_{std::string(kSep)} { index_.emplace(tokens_[0], 0); }

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  std::vector<std::string> sorted(tokens.begin(), tokens.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::erase(sorted, std::string(kSep));
  std::vector<std::string> ordered{std::string(kSep)};
  ordered.insert(ordered.end(), std::make_move_iterator(sorted.begin()), std::make_move_iterator(sorted.end()));
  return from_ordered(std::move(ordered));
}

Vocabulary Vocabulary::from_ordered(std::vector<std::string> tokens) {
  if (tokens.empty() || tokens[0] != kSep) throw CheckpointError("vocabulary must start with the separator token");
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  v.index_.clear();
  v.index_.reserve(v.tokens_.size());
  for (std::uint32_t i = 0; i < v.tokens_.size(); ++i) {
    if (!v.index_.emplace(v.tokens_[i], i).second) {
      throw CheckpointError("duplicate vocabulary token \"" + v.tokens_[i] + "\"");
    }
  }
  return v;
}

std::optional<std::uint32_t> Vocabulary::lookup(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenIds Vocabulary::to_ids(TokenSpan tokens, std::size_t max_len) const {
  TokenIds ids;
  const auto n = std::min(tokens.size(), max_len);
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (auto id = lookup(tokens[i])) ids.push_back(*id);
  }
  return ids;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& t : tokens_) {
    for (char c : t) mix(static_cast<unsigned char>(c));
    mix(0xFF);
  }
  return h;
}

EncoderWeights EncoderWeights::zeros_like(const EncoderWeights& w) {
  return {Matrix(w.embedding.rows, w.embedding.cols), Matrix(w.projection.rows, w.projection.cols),
          Vec(w.head.size(), 0.0)};
}

bool EncoderWeights::same_shape(const EncoderWeights& o) const {
  return embedding.rows == o.embedding.rows && embedding.cols == o.embedding.cols &&
         projection.rows == o.projection.rows && projection.cols == o.projection.cols &&
         head.size() == o.head.size();
}

bool EncoderWeights::all_finite() const {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  return finite(embedding.data) && finite(projection.data) && finite(head);
}

EncoderParams init_params(Vocabulary vocab, const EncoderConfig& cfg) {
  if (cfg.dim == 0) throw ValidationError("encoder dimension must be positive");
  if (cfg.max_len == 0) throw ValidationError("encoder max_len must be positive");
  EncoderParams p;
  p.dim = cfg.dim;
  p.max_len = cfg.max_len;
  p.weights.embedding = Matrix(vocab.size(), cfg.dim);
  p.weights.projection = Matrix(cfg.dim, cfg.dim);
  p.weights.head.assign(cfg.dim, 0.0);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(-cfg.init_scale, cfg.init_scale);
  for (auto& x : p.weights.embedding.data) x = uni(rng);
  for (auto& x : p.weights.projection.data) x = uni(rng);
  p.vocab = std::move(vocab);
  return p;
}

EncodeTape encode_forward(const EncoderParams& p, const TokenIds& ids) {
  const auto dim = p.dim;
  EncodeTape t;
  t.ids = ids;
  t.pooled.assign(dim, 0.0);
  if (!ids.empty()) {
    for (auto id : ids) {
      auto row = p.weights.embedding.row(id);
      for (std::size_t j = 0; j < dim; ++j) t.pooled[j] += row[j];
    }
    const double inv = 1.0 / static_cast<double>(ids.size());
    for (auto& x : t.pooled) x *= inv;
  }
  t.out.assign(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    auto row = p.weights.projection.row(i);
    double h = 0.0;
    for (std::size_t j = 0; j < dim; ++j) h += row[j] * t.pooled[j];
    t.out[i] = std::tanh(h);
  }
  return t;
}

void encode_backward(const EncoderParams& p, const EncodeTape& tape, std::span<const double> grad_out,
                     EncoderWeights& grads) {
  const auto dim = p.dim;
  Vec grad_h(dim);
  for (std::size_t i = 0; i < dim; ++i) grad_h[i] = grad_out[i] * (1.0 - tape.out[i] * tape.out[i]);

  Vec grad_pooled(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    if (grad_h[i] == 0.0) continue;
    auto w_row = p.weights.projection.row(i);
    auto g_row = grads.projection.row(i);
    for (std::size_t j = 0; j < dim; ++j) {
      g_row[j] += grad_h[i] * tape.pooled[j];
      grad_pooled[j] += w_row[j] * grad_h[i];
    }
  }
  if (tape.ids.empty()) return;
  const double inv = 1.0 / static_cast<double>(tape.ids.size());
  for (auto id : tape.ids) {
    auto g_row = grads.embedding.row(id);
    for (std::size_t j = 0; j < dim; ++j) g_row[j] += grad_pooled[j] * inv;
  }
}

EncodedVec encode_ids(const EncoderParams& p, const TokenIds& ids) { return encode_forward(p, ids).out; }

EncodedVec encode(const EncoderParams& p, TokenSpan tokens) {
  return encode_ids(p, p.vocab.to_ids(tokens, p.max_len));
}

TokenIds joint_ids(const EncoderParams& p, const TokenIds& a, const TokenIds& b) {
  TokenIds ids;
  ids.reserve(a.size() + b.size() + 1);
  ids.insert(ids.end(), a.begin(), a.end());
  ids.push_back(p.vocab.sep());
  ids.insert(ids.end(), b.begin(), b.end());
  return ids;
}

TokenIds joint_ids(const EncoderParams& p, TokenSpan a, TokenSpan b) {
  return joint_ids(p, p.vocab.to_ids(a, p.max_len), p.vocab.to_ids(b, p.max_len));
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double cosine(std::span<const double> x, std::span<const double> y) {
  const double nx = std::sqrt(dot(x, x));
  const double ny = std::sqrt(dot(y, y));
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return dot(x, y) / (nx * ny);
}

double bi_score(const EncoderParams& p, TokenSpan a, TokenSpan b) {
  return cosine(encode(p, a), encode(p, b));
}

EncodedVec cross_encode(const EncoderParams& p, TokenSpan a, TokenSpan b) {
  return encode_ids(p, joint_ids(p, a, b));
}

double cross_score(const EncoderParams& p, TokenSpan a, TokenSpan b) {
  return dot(p.weights.head, cross_encode(p, a, b));
}

}  // namespace micol
