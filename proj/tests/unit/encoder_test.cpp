#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "micol/encoder.hpp"
#include "micol/error.hpp"

namespace micol {
namespace {

EncoderParams small_params(std::uint64_t seed = 1, std::size_t dim = 8, std::size_t max_len = 256) {
  auto vocab = Vocabulary::from_tokens({"web", "graph", "mining", "neural", "networks", "protein"});
  return init_params(std::move(vocab), {.dim = dim, .max_len = max_len, .init_scale = 0.1, .seed = seed});
}

double direct_cosine(const EncodedVec& x, const EncodedVec& y) {
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xy += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  return xy / std::sqrt(xx * yy);
}

TEST(Vocabulary, SeparatorFirstAndSorted) {
  const auto v = Vocabulary::from_tokens({"b", "a", "b"});
  EXPECT_EQ(v.tokens(), (std::vector<std::string>{"[SEP]", "a", "b"}));
  EXPECT_EQ(v.lookup("a"), 1u);
  EXPECT_FALSE(v.lookup("zz").has_value());
  EXPECT_THROW(Vocabulary::from_ordered({"a", "[SEP]"}), CheckpointError);
  EXPECT_THROW(Vocabulary::from_ordered({"[SEP]", "a", "a"}), CheckpointError);
  EXPECT_NE(v.hash(), Vocabulary::from_tokens({"a", "c"}).hash());
}

TEST(Vocabulary, TruncatesThenSkipsUnknown) {
  const auto v = Vocabulary::from_tokens({"a", "b"});
  EXPECT_EQ(v.to_ids(Tokens{"a", "zz", "b", "a"}, 3), (TokenIds{1, 2}));
}

TEST(InitParams, ShapesRangeAndZeroHead) {
  const auto p = small_params();
  EXPECT_EQ(p.weights.embedding.rows, p.vocab.size());
  EXPECT_EQ(p.weights.embedding.cols, 8u);
  EXPECT_EQ(p.weights.projection.rows, 8u);
  for (double x : p.weights.embedding.data) EXPECT_LE(std::abs(x), 0.1);
  for (double x : p.weights.head) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(small_params(1), small_params(1));
  EXPECT_NE(small_params(1).weights, small_params(2).weights);
}

TEST(Encode, EmptyAndOutOfVocabularyGiveZero) {
  const auto p = small_params();
  for (double x : encode(p, Tokens{})) EXPECT_EQ(x, 0.0);
  for (double x : encode(p, Tokens{"unknown", "words"})) EXPECT_EQ(x, 0.0);
}

TEST(Encode, SingleToken) {
  const auto p = small_params();
  const auto id = *p.vocab.lookup("graph");
  const auto out = encode(p, Tokens{"graph"});
  for (std::size_t i = 0; i < p.dim; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < p.dim; ++j) s += p.weights.projection(i, j) * p.weights.embedding(id, j);
    EXPECT_NEAR(out[i], std::tanh(s), 1e-15);
  }
}

TEST(Encode, OrderInvariantAndBounded) {
  const auto p = small_params();
  const auto a = encode(p, Tokens{"web", "graph", "mining"});
  const auto b = encode(p, Tokens{"mining", "web", "graph"});
  for (std::size_t i = 0; i < p.dim; ++i) {
    EXPECT_NEAR(a[i], b[i], 1e-15);
    EXPECT_LT(std::abs(a[i]), 1.0);
  }
}

TEST(Encode, TruncatesToMaxLen) {
  const auto p = small_params(1, 8, 2);
  const auto a = encode(p, Tokens{"web", "graph", "protein"});
  const auto b = encode(p, Tokens{"web", "graph"});
  EXPECT_EQ(a, b);
}

TEST(BiScore, IdentityAndSymmetry) {
  const auto p = small_params();
  const Tokens a = {"web", "graph"}, b = {"neural", "networks", "protein"};
  EXPECT_NEAR(bi_score(p, a, a), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(bi_score(p, a, b), bi_score(p, b, a));
  EXPECT_EQ(bi_score(p, a, Tokens{}), 0.0);
}

TEST(BiScore, Antipodal) {
  const std::vector<double> x = {0.5, -0.25, 0.1};
  const std::vector<double> y = {-0.5, 0.25, -0.1};
  EXPECT_NEAR(cosine(x, y), -1.0, 1e-15);
}

TEST(BiScore, MatchesDirectOracle) {
  std::mt19937_64 rng(8);
  const auto p = small_params(3, 16);
  const auto& vocab = p.vocab.tokens();
  std::uniform_int_distribution<std::size_t> pick(1, vocab.size() - 1), len(1, 6);
  for (int trial = 0; trial < 50; ++trial) {
    Tokens a, b;
    for (auto n = len(rng); n > 0; --n) a.push_back(vocab[pick(rng)]);
    for (auto n = len(rng); n > 0; --n) b.push_back(vocab[pick(rng)]);
    const double s = bi_score(p, a, b);
    EXPECT_NEAR(s, direct_cosine(encode(p, a), encode(p, b)), 1e-12);
    EXPECT_GE(s, -1.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(CrossEncode, ConcatenationWithSeparator) {
  const auto p = small_params();
  const Tokens b = {"graph", "mining"};
  EXPECT_EQ(joint_ids(p, Tokens{}, b), (TokenIds{0, *p.vocab.lookup("graph"), *p.vocab.lookup("mining")}));
  EXPECT_EQ(cross_encode(p, Tokens{}, b), encode_ids(p, joint_ids(p, Tokens{}, b)));
  EXPECT_EQ(cross_encode(p, Tokens{}, Tokens{}), encode_ids(p, TokenIds{0}));
}

TEST(CrossEncode, EachSideTruncatedSeparately) {
  const auto p = small_params(1, 8, 1);
  EXPECT_EQ(joint_ids(p, Tokens{"web", "graph"}, Tokens{"neural", "protein"}),
            (TokenIds{*p.vocab.lookup("web"), 0, *p.vocab.lookup("neural")}));
}

TEST(CrossScore, HeadProjection) {
  auto p = small_params();
  const Tokens a = {"web", "graph"}, b = {"protein"};
  EXPECT_EQ(cross_score(p, a, b), 0.0);
  p.weights.head.assign(p.dim, 0.0);
  p.weights.head[3] = 1.0;
  EXPECT_DOUBLE_EQ(cross_score(p, a, b), cross_encode(p, a, b)[3]);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& w : p.weights.head) w = u(rng);
  const auto e = cross_encode(p, a, b);
  double expected = 0.0;
  for (std::size_t i = 0; i < p.dim; ++i) expected += p.weights.head[i] * e[i];
  EXPECT_NEAR(cross_score(p, a, b), expected, 1e-12);
}

TEST(Checkpoint, ByteExactRoundTrip) {
  auto p = small_params(5);
  p.weights.head[1] = -0.375;
  const auto bytes = serialize_checkpoint(p);
  const auto back = deserialize_checkpoint(bytes);
  EXPECT_EQ(back, p);
  EXPECT_EQ(serialize_checkpoint(back), bytes);
}

TEST(Checkpoint, FileRoundTrip) {
  const auto p = small_params(6);
  const auto path = std::filesystem::temp_directory_path() / "micol_encoder_test" / "ckpt.bin";
  save_checkpoint(p, path);
  EXPECT_EQ(load_checkpoint(path), p);
  std::filesystem::remove_all(path.parent_path());
}

TEST(Checkpoint, TruncationDetected) {
  const auto bytes = serialize_checkpoint(small_params());
  for (std::size_t cut : {std::size_t{0}, std::size_t{7}, bytes.size() / 2, bytes.size() - 1}) {
    EXPECT_THROW(deserialize_checkpoint(std::string_view(bytes).substr(0, cut)), CheckpointError);
  }
}

TEST(Checkpoint, CorruptionDetected) {
  auto bytes = serialize_checkpoint(small_params());
  bytes[bytes.size() / 2] ^= 0x01;
  EXPECT_THROW(deserialize_checkpoint(bytes), CheckpointError);
  auto bad_magic = serialize_checkpoint(small_params());
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_checkpoint(bad_magic), CheckpointError);
}

TEST(Checkpoint, VersionMismatchDetected) {
  auto bytes = serialize_checkpoint(small_params());
  bytes[8] = 9;  // version field follows the 8-byte magic
  EXPECT_THROW(deserialize_checkpoint(bytes), CheckpointError);
}

TEST(Checkpoint, VocabularyMismatch) {
  const auto p = small_params();
  EXPECT_NO_THROW(check_vocabulary(p, p.vocab));
  EXPECT_THROW(check_vocabulary(p, Vocabulary::from_tokens({"other"})), CheckpointError);
}

TEST(Checkpoint, MissingFileIsIoError) { EXPECT_THROW(load_checkpoint("/nonexistent/ckpt.bin"), IoError); }

}  // namespace
}  // namespace micol
