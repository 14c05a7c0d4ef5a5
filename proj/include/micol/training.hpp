#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "micol/corpus.hpp"
#include "micol/encoder.hpp"
#include "micol/hin.hpp"
#include <json.hpp>

namespace micol {

enum class Arch { kBi, kCross };

std::string_view arch_name(Arch a);
Arch parse_arch(std::string_view name);

struct TrainConfig {
  Arch arch = Arch::kBi;
  double tau = 0.05;
  /// 0 selects the architecture default (8 for bi, 4 for cross).
  std::size_t batch = 0;
  std::size_t epochs = 3;
  double lr = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  EncoderConfig encoder;

  std::size_t batch_size() const;
  /// Throws ValidationError for tau <= 0, epochs == 0, or a bi batch < 2.
  void validate() const;
};

inline constexpr std::size_t kDefaultTrainPairs = 50000;
inline constexpr std::size_t kDefaultValPairs = 5000;

struct LossAndGrad {
  double loss = 0.0;
  EncoderWeights grads;
};

/// In-batch InfoNCE over a cosine-similarity matrix: sim(i, j) is the cosine
/// between anchor i and positive j. Returns the mean loss and writes
/// d(loss)/d(sim) into `grad_sim` when non-null.
double info_nce(const Matrix& sim, double tau, Matrix* grad_sim = nullptr);

/// Two-way softmax loss -log(e^pos / (e^pos + e^neg)), computed stably.
double pairwise_nce(double pos, double neg);

struct IdPair {
  const TokenIds* anchor;
  const TokenIds* positive;
};
struct IdTriple {
  const TokenIds* anchor;
  const TokenIds* positive;
  const TokenIds* negative;
};

/// Bi-encoder contrastive loss with in-batch negatives and its exact
/// gradient over embedding and projection. Throws ValidationError for a
/// batch smaller than 2 or tau <= 0.
LossAndGrad bi_batch_loss(const EncoderParams& p, const std::vector<IdPair>& batch, double tau);
LossAndGrad bi_batch_loss(const EncoderParams& p, const std::vector<std::pair<Tokens, Tokens>>& batch,
                          double tau);

/// Cross-encoder loss with one sampled negative per anchor, and its exact
/// gradient over all three weight blocks.
LossAndGrad cross_batch_loss(const EncoderParams& p, const std::vector<IdTriple>& batch);
struct TokenTriple {
  Tokens anchor;
  Tokens positive;
  Tokens negative;
};
LossAndGrad cross_batch_loss(const EncoderParams& p, const std::vector<TokenTriple>& batch);

struct AdamState {
  EncoderWeights m;
  EncoderWeights v;
  std::uint64_t step = 0;

  static AdamState for_weights(const EncoderWeights& w);
};

/// One bias-corrected Adam update. Throws ValidationError on shape mismatch.
void adam_step(EncoderWeights& params, const EncoderWeights& grads, AdamState& state,
               const TrainConfig& cfg);

struct TrainReport {
  std::vector<double> epoch_train_loss;
  std::vector<std::optional<double>> epoch_val_loss;
  std::optional<double> initial_val_loss;
  std::size_t steps = 0;
  double wall_seconds = 0.0;
  std::string checkpoint;

  nlohmann::json to_json() const;
};

struct TrainResult {
  EncoderParams params;
  TrainReport report;
};

/// Vocabulary over the corpus texts and the label texts.
Vocabulary build_vocabulary(const std::vector<Document>& docs, const LabelSpace& labels,
                            const TokenizerConfig& tok = {});

/// Contrastive fine-tuning loop. Pair indices refer to `docs`. Throws
/// ValidationError when a document carries labels, when no pairs are given,
/// or when a bi-encoder run cannot fill a single batch.
TrainResult train(const std::vector<Document>& docs, const Vocabulary& vocab,
                  const std::vector<PairSample>& train_pairs,
                  const std::vector<PairSample>& val_pairs, const TrainConfig& cfg,
                  const TokenizerConfig& tok = {});

}  // namespace micol
