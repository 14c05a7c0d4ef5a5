#include "micol/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "micol/error.hpp"

namespace micol {
namespace {

// d cos(x, y) / dx, scaled by `scale` and added to `out`.
void add_cosine_grad(std::span<const double> x, std::span<const double> y, double scale,
                     std::span<double> out) {
  const double xx = dot(x, x);
  const double yy = dot(y, y);
  if (xx == 0.0 || yy == 0.0 || scale == 0.0) return;
  const double nx = std::sqrt(xx);
  const double ny = std::sqrt(yy);
  const double c = dot(x, y) / (nx * ny);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += scale * (y[i] / (nx * ny) - c * x[i] / xx);
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_ids(const EncoderParams& p, const TokenIds& ids) {
  for (auto id : ids) {
    if (id >= p.vocab.size()) throw ValidationError("token id out of vocabulary range");
  }
}

}  // namespace

std::string_view arch_name(Arch a) { return a == Arch::kBi ? "bi" : "cross"; }

Arch parse_arch(std::string_view name) {
  if (name == "bi") return Arch::kBi;
  if (name == "cross") return Arch::kCross;
  throw ValidationError("unknown architecture \"" + std::string(name) + "\" (expected bi or cross)");
}

std::size_t TrainConfig::batch_size() const {
  if (batch != 0) return batch;
  return arch == Arch::kBi ? 8 : 4;
}

void TrainConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be a positive finite number");
  if (epochs == 0) throw ValidationError("epochs must be at least 1");
  if (arch == Arch::kBi && batch_size() < 2) {
    throw ValidationError("bi-encoder batch size must be at least 2 (in-batch negatives)");
  }
  if (batch_size() == 0) throw ValidationError("batch size must be positive");
  if (!(lr > 0.0)) throw ValidationError("learning rate must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ValidationError("Adam betas must lie in [0, 1)");
  }
}

double info_nce(const Matrix& sim, double tau, Matrix* grad_sim) {
  const auto n = sim.rows;
  if (n == 0 || sim.cols != n) throw ValidationError("similarity matrix must be square and non-empty");
  if (grad_sim) *grad_sim = Matrix(n, n);
  double total = 0.0;
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) z[j] = sim(i, j) / tau;
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += std::exp(z[j] - m);
    total += (m - z[i]) + std::log(sum);
    if (grad_sim) {
      for (std::size_t j = 0; j < n; ++j) {
        const double softmax = std::exp(z[j] - m) / sum;
        (*grad_sim)(i, j) = (softmax - (i == j ? 1.0 : 0.0)) / (static_cast<double>(n) * tau);
      }
    }
  }
  return total / static_cast<double>(n);
}

double pairwise_nce(double pos, double neg) {
  const double x = neg - pos;
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

LossAndGrad bi_batch_loss(const EncoderParams& p, const std::vector<IdPair>& batch, double tau) {
  if (batch.size() < 2) throw ValidationError("bi-encoder batch needs at least 2 pairs");
  if (!(tau > 0.0)) throw ValidationError("tau must be positive");
  const auto n = batch.size();
  std::vector<EncodeTape> anchors, positives;
  anchors.reserve(n);
  positives.reserve(n);
  for (const auto& pr : batch) {
    check_ids(p, *pr.anchor);
    check_ids(p, *pr.positive);
    anchors.push_back(encode_forward(p, *pr.anchor));
    positives.push_back(encode_forward(p, *pr.positive));
  }
  Matrix sim(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) sim(i, j) = cosine(anchors[i].out, positives[j].out);
  }
  Matrix g;
  LossAndGrad r;
  r.loss = info_nce(sim, tau, &g);
  r.grads = EncoderWeights::zeros_like(p.weights);

  std::vector<Vec> ga(n, Vec(p.dim, 0.0)), gp(n, Vec(p.dim, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      add_cosine_grad(anchors[i].out, positives[j].out, g(i, j), ga[i]);
      add_cosine_grad(positives[j].out, anchors[i].out, g(i, j), gp[j]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    encode_backward(p, anchors[i], ga[i], r.grads);
    encode_backward(p, positives[i], gp[i], r.grads);
  }
  return r;
}

LossAndGrad bi_batch_loss(const EncoderParams& p, const std::vector<std::pair<Tokens, Tokens>>& batch,
                          double tau) {
  std::vector<TokenIds> ids;
  ids.reserve(batch.size() * 2);
  for (const auto& [a, b] : batch) {
    ids.push_back(p.vocab.to_ids(a, p.max_len));
    ids.push_back(p.vocab.to_ids(b, p.max_len));
  }
  std::vector<IdPair> pairs;
  for (std::size_t i = 0; i < batch.size(); ++i) pairs.push_back({&ids[2 * i], &ids[2 * i + 1]});
  return bi_batch_loss(p, pairs, tau);
}

LossAndGrad cross_batch_loss(const EncoderParams& p, const std::vector<IdTriple>& batch) {
  if (batch.empty()) throw ValidationError("cross-encoder batch must not be empty");
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  LossAndGrad r;
  r.grads = EncoderWeights::zeros_like(p.weights);
  const auto& w = p.weights.head;
  Vec grad_out(p.dim);
  for (const auto& t : batch) {
    check_ids(p, *t.anchor);
    check_ids(p, *t.positive);
    check_ids(p, *t.negative);
    const auto pos = encode_forward(p, joint_ids(p, *t.anchor, *t.positive));
    const auto neg = encode_forward(p, joint_ids(p, *t.anchor, *t.negative));
    const double s_pos = dot(w, pos.out);
    const double s_neg = dot(w, neg.out);
    r.loss += pairwise_nce(s_pos, s_neg) * inv_n;

    const double g_neg = sigmoid(s_neg - s_pos) * inv_n;
    const double g_pos = -g_neg;
    for (std::size_t i = 0; i < p.dim; ++i) r.grads.head[i] += g_pos * pos.out[i] + g_neg * neg.out[i];
    for (std::size_t i = 0; i < p.dim; ++i) grad_out[i] = g_pos * w[i];
    encode_backward(p, pos, grad_out, r.grads);
    for (std::size_t i = 0; i < p.dim; ++i) grad_out[i] = g_neg * w[i];
    encode_backward(p, neg, grad_out, r.grads);
  }
  return r;
}

LossAndGrad cross_batch_loss(const EncoderParams& p, const std::vector<TokenTriple>& batch) {
  std::vector<TokenIds> ids;
  ids.reserve(batch.size() * 3);
  for (const auto& t : batch) {
    ids.push_back(p.vocab.to_ids(t.anchor, p.max_len));
    ids.push_back(p.vocab.to_ids(t.positive, p.max_len));
    ids.push_back(p.vocab.to_ids(t.negative, p.max_len));
  }
  std::vector<IdTriple> triples;
  for (std::size_t i = 0; i < batch.size(); ++i) triples.push_back({&ids[3 * i], &ids[3 * i + 1], &ids[3 * i + 2]});
  return cross_batch_loss(p, triples);
}

AdamState AdamState::for_weights(const EncoderWeights& w) {
  return {EncoderWeights::zeros_like(w), EncoderWeights::zeros_like(w), 0};
}

void adam_step(EncoderWeights& params, const EncoderWeights& grads, AdamState& state, const TrainConfig& cfg) {
  if (!params.same_shape(grads) || !params.same_shape(state.m) || !params.same_shape(state.v)) {
    throw ValidationError("Adam: gradient or state shape does not match parameters");
  }
  ++state.step;
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  auto update = [&](std::vector<double>& x, const std::vector<double>& g, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      x[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
    }
  };
  update(params.embedding.data, grads.embedding.data, state.m.embedding.data, state.v.embedding.data);
  update(params.projection.data, grads.projection.data, state.m.projection.data, state.v.projection.data);
  update(params.head, grads.head, state.m.head, state.v.head);
}

nlohmann::json TrainReport::to_json() const {
  nlohmann::json val = nlohmann::json::array();
  for (const auto& v : epoch_val_loss) val.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  return {{"epoch_train_loss", epoch_train_loss},
          {"epoch_val_loss", val},
          {"initial_val_loss", initial_val_loss ? nlohmann::json(*initial_val_loss) : nlohmann::json(nullptr)},
          {"steps", steps},
          {"wall_seconds", wall_seconds},
          {"checkpoint", checkpoint}};
}

Vocabulary build_vocabulary(const std::vector<Document>& docs, const LabelSpace& labels,
                            const TokenizerConfig& tok) {
  std::vector<std::string> all;
  for (const auto& d : docs) {
    auto t = tokenize(d.text, tok);
    all.insert(all.end(), t.begin(), t.end());
  }
  for (const auto& l : labels.labels) {
    for (const auto& n : l.names) {
      auto t = tokenize(n, tok);
      all.insert(all.end(), t.begin(), t.end());
    }
    auto t = tokenize(l.description, tok);
    all.insert(all.end(), t.begin(), t.end());
  }
  return Vocabulary::from_tokens(all);
}

namespace {

class Trainer {
 public:
  Trainer(const std::vector<Document>& docs, const Vocabulary& vocab, const TrainConfig& cfg,
          const TokenizerConfig& tok)
      : cfg_(cfg), rng_(cfg.seed) {
    EncoderConfig enc = cfg.encoder;
    enc.seed = cfg.seed ^ 0x9E3779B97F4A7C15ULL;
    params_ = init_params(vocab, enc);
    ids_.reserve(docs.size());
    for (const auto& d : docs) ids_.push_back(params_.vocab.to_ids(tokenize(d.text, tok), params_.max_len));
  }

  EncoderParams& params() { return params_; }

  DocIndex draw_negative(DocIndex anchor, std::mt19937_64& rng) const {
    std::uniform_int_distribution<std::size_t> uni(0, ids_.size() - 2);
    auto n = static_cast<DocIndex>(uni(rng));
    return n >= anchor ? n + 1 : n;
  }

  // Loss (and gradient) for pairs[order[begin..end)].
  LossAndGrad batch(const std::vector<PairSample>& pairs, std::span<const std::size_t> order,
                    std::span<const DocIndex> negatives) const {
    if (cfg_.arch == Arch::kBi) {
      std::vector<IdPair> b;
      for (auto i : order) b.push_back({&ids_[pairs[i].anchor], &ids_[pairs[i].positive]});
      return bi_batch_loss(params_, b, cfg_.tau);
    }
    std::vector<IdTriple> b;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto& pr = pairs[order[k]];
      b.push_back({&ids_[pr.anchor], &ids_[pr.positive], &ids_[negatives[k]]});
    }
    return cross_batch_loss(params_, b);
  }

  std::optional<double> validation_loss(const std::vector<PairSample>& val,
                                        const std::vector<DocIndex>& val_negatives) const {
    if (val.empty()) return std::nullopt;
    const auto beta = cfg_.batch_size();
    std::vector<std::size_t> order(val.size());
    std::iota(order.begin(), order.end(), 0);
    if (cfg_.arch == Arch::kBi) {
      if (val.size() < 2) return std::nullopt;
      const std::size_t full = val.size() / beta;
      if (full == 0) return batch(val, order, {}).loss;
      double total = 0.0;
      for (std::size_t b = 0; b < full; ++b) total += batch(val, std::span(order).subspan(b * beta, beta), {}).loss;
      return total / static_cast<double>(full);
    }
    double total = 0.0;
    for (std::size_t start = 0; start < val.size(); start += beta) {
      const auto len = std::min(beta, val.size() - start);
      total += batch(val, std::span(order).subspan(start, len), std::span(val_negatives).subspan(start, len)).loss *
               static_cast<double>(len);
    }
    return total / static_cast<double>(val.size());
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  TrainConfig cfg_;
  std::mt19937_64 rng_;
  EncoderParams params_;
  std::vector<TokenIds> ids_;
};

}  // namespace

TrainResult train(const std::vector<Document>& docs, const Vocabulary& vocab,
                  const std::vector<PairSample>& train_pairs, const std::vector<PairSample>& val_pairs,
                  const TrainConfig& cfg, const TokenizerConfig& tok) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  for (const auto& d : docs) {
    if (d.labels && !d.labels->empty()) {
      throw ValidationError("training corpus must be unlabeled, but document \"" + d.id + "\" carries labels");
    }
  }
  if (train_pairs.empty()) throw ValidationError("no training pairs");
  for (const auto* set : {&train_pairs, &val_pairs}) {
    for (const auto& p : *set) {
      if (p.anchor >= docs.size() || p.positive >= docs.size()) {
        throw ValidationError("pair references a document outside the corpus");
      }
    }
  }
  const auto beta = cfg.batch_size();
  if (cfg.arch == Arch::kBi && train_pairs.size() < beta) {
    throw ValidationError("batch underfull: " + std::to_string(train_pairs.size()) +
                          " training pairs cannot fill one batch of " + std::to_string(beta));
  }
  if (cfg.arch == Arch::kCross && docs.size() < 2) {
    throw ValidationError("cross-encoder training needs at least 2 documents to draw negatives");
  }

  Trainer trainer(docs, vocab, cfg, tok);
  TrainResult result;
  auto& report = result.report;

  std::vector<DocIndex> val_negatives;
  if (cfg.arch == Arch::kCross) {
    std::mt19937_64 val_rng(cfg.seed + 1);
    for (const auto& p : val_pairs) val_negatives.push_back(trainer.draw_negative(p.anchor, val_rng));
  }
  report.initial_val_loss = trainer.validation_loss(val_pairs, val_negatives);

  AdamState adam = AdamState::for_weights(trainer.params().weights);
  std::vector<std::size_t> order(train_pairs.size());
  std::vector<DocIndex> negatives;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), trainer.rng());
    negatives.clear();
    if (cfg.arch == Arch::kCross) {
      for (auto i : order) negatives.push_back(trainer.draw_negative(train_pairs[i].anchor, trainer.rng()));
    }
    // Underfull trailing batches are dropped for bi and kept for cross.
    const std::size_t usable = cfg.arch == Arch::kBi ? (order.size() / beta) * beta : order.size();
    double total = 0.0;
    for (std::size_t s = 0; s < usable; s += beta) {
      const auto len = std::min(beta, usable - s);
      auto neg = cfg.arch == Arch::kCross ? std::span<const DocIndex>(negatives).subspan(s, len)
                                          : std::span<const DocIndex>();
      auto lg = trainer.batch(train_pairs, std::span(order).subspan(s, len), neg);
      if (!std::isfinite(lg.loss)) throw InvariantError("training loss became non-finite");
      total += lg.loss * static_cast<double>(len);
      adam_step(trainer.params().weights, lg.grads, adam, cfg);
      ++report.steps;
    }
    report.epoch_train_loss.push_back(total / static_cast<double>(usable));
    report.epoch_val_loss.push_back(trainer.validation_loss(val_pairs, val_negatives));
  }
  if (!trainer.params().weights.all_finite()) throw InvariantError("parameters became non-finite");
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.params = std::move(trainer.params());
  return result;
}

}  // namespace micol
