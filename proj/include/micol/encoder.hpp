#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "micol/tokenizer.hpp"

namespace micol {

using Vec = std::vector<double>;
using EncodedVec = Vec;
using TokenIds = std::vector<std::uint32_t>;

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool operator==(const Matrix&) const = default;
};

/// Token to dense index map. Index 0 is always the reserved separator token,
/// which the tokenizer can never produce.
class Vocabulary {
 public:
  static constexpr std::string_view kSep = "[SEP]";

  Vocabulary();
  /// Separator plus the sorted set of `tokens`.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);
  /// Throws CheckpointError unless tokens[0] is the separator and all
  /// entries are distinct.
  static Vocabulary from_ordered(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::optional<std::uint32_t> lookup(std::string_view token) const;
  std::uint32_t sep() const noexcept { return 0; }

  /// Truncates to `max_len` tokens, then drops out-of-vocabulary ones.
  TokenIds to_ids(TokenSpan tokens, std::size_t max_len) const;

  /// FNV-1a over the ordered token list.
  std::uint64_t hash() const;

  bool operator==(const Vocabulary& o) const { return tokens_ == o.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Trainable state. Gradients and Adam moments use the same shape.
struct EncoderWeights {
  Matrix embedding;   // |vocab| x dim
  Matrix projection;  // dim x dim
  Vec head;           // dim, the linear cross-scoring vector

  static EncoderWeights zeros_like(const EncoderWeights& w);
  bool same_shape(const EncoderWeights& o) const;
  bool all_finite() const;
  bool operator==(const EncoderWeights&) const = default;
};

struct EncoderConfig {
  std::size_t dim = 64;
  std::size_t max_len = 256;
  double init_scale = 0.1;
  std::uint64_t seed = 0;
};

/// Reference encoder: mean of token embeddings, then tanh(projection * mean).
struct EncoderParams {
  Vocabulary vocab;
  std::size_t dim = 0;
  std::size_t max_len = 0;
  EncoderWeights weights;

  bool operator==(const EncoderParams&) const = default;
};

/// Embedding and projection entries i.i.d. uniform in [-init_scale,
/// init_scale]; the head starts at zero.
EncoderParams init_params(Vocabulary vocab, const EncoderConfig& cfg);

/// Forward pass with the intermediate values needed for backprop.
struct EncodeTape {
  TokenIds ids;
  Vec pooled;
  Vec out;
};

EncodeTape encode_forward(const EncoderParams& p, const TokenIds& ids);
/// Accumulates d(loss)/d(weights) into `grads` given d(loss)/d(out).
void encode_backward(const EncoderParams& p, const EncodeTape& tape, std::span<const double> grad_out,
                     EncoderWeights& grads);

EncodedVec encode_ids(const EncoderParams& p, const TokenIds& ids);
EncodedVec encode(const EncoderParams& p, TokenSpan tokens);

/// Token ids of `a ‖ SEP ‖ b`, each side truncated to max_len first.
TokenIds joint_ids(const EncoderParams& p, TokenSpan a, TokenSpan b);
TokenIds joint_ids(const EncoderParams& p, const TokenIds& a, const TokenIds& b);

/// cos(x, y), defined as 0 when either vector has zero norm.
double cosine(std::span<const double> x, std::span<const double> y);
double dot(std::span<const double> x, std::span<const double> y);

double bi_score(const EncoderParams& p, TokenSpan a, TokenSpan b);
EncodedVec cross_encode(const EncoderParams& p, TokenSpan a, TokenSpan b);
double cross_score(const EncoderParams& p, TokenSpan a, TokenSpan b);

/// Binary checkpoint, little-endian:
///   magic "MICOLCKP" | u32 version | u32 dim | u32 max_len | u64 vocab size
///   | per token: u32 byte length + UTF-8 bytes | f64 embedding (row-major)
///   | f64 projection | f64 head | u64 vocab hash | u64 FNV-1a of all
///   preceding bytes.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_checkpoint(const EncoderParams& p);
/// Throws CheckpointError on bad magic, version, truncation, checksum or
/// vocabulary hash.
EncoderParams deserialize_checkpoint(std::string_view bytes);
void save_checkpoint(const EncoderParams& p, const std::filesystem::path& path);
EncoderParams load_checkpoint(const std::filesystem::path& path);
/// Throws CheckpointError when the checkpoint was built over another
/// vocabulary.
void check_vocabulary(const EncoderParams& p, const Vocabulary& expected);

}  // namespace micol
