#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "micol/error.hpp"
#include "micol/retrieval.hpp"
#include "oracles/bm25_oracle.hpp"

namespace micol {
namespace {

LabelSpace toy_labels() {
  return make_label_space({{"l1", {"web graph"}, "", 0},
                           {"l2", {"graph mining algorithms"}, "", 0},
                           {"l3", {"neural networks"}, "", 0}});
}

TEST(Bm25Index, Statistics) {
  const auto idx = Bm25Index::build(toy_labels());
  EXPECT_DOUBLE_EQ(idx.avgdl(), 7.0 / 3.0);
  EXPECT_EQ(idx.doc_freq("graph"), 2u);
  EXPECT_EQ(idx.doc_freq("unseen"), 0u);
  EXPECT_EQ(idx.idf("unseen"), 0.0);
  EXPECT_EQ(idx.term_freq("graph", 1), 1u);
  EXPECT_EQ(idx.label_length(1), 3u);
}

TEST(Bm25Index, EmptyLabelSpaceRejected) { EXPECT_THROW(Bm25Index::build(LabelSpace{}), ValidationError); }

TEST(Bm25Score, ToyValue) {
  const auto labels = toy_labels();
  const auto idx = Bm25Index::build(labels);
  const Tokens q = {"graph"};
  const double expected = std::log(1.6) * 2.5 / (1.0 + 1.5 * (0.25 + 0.75 * 2.0 / (7.0 / 3.0)));
  EXPECT_NEAR(idx.score(q, 0), expected, 1e-12);
  EXPECT_NEAR(idx.score(q, 0), 0.5023, 1e-4);
}

TEST(Bm25Score, NoSharedTokensIsZero) {
  const auto idx = Bm25Index::build(toy_labels());
  EXPECT_EQ(idx.score(Tokens{"protein", "folding"}, 0), 0.0);
}

TEST(Bm25Score, DuplicateQueryTokensCountOnce) {
  const auto idx = Bm25Index::build(toy_labels());
  EXPECT_EQ(idx.score(Tokens{"graph"}, 1), idx.score(Tokens{"graph", "graph", "graph"}, 1));
}

TEST(Bm25Score, LiteralLengthNormUsesLabelCount) {
  const auto labels = toy_labels();
  const auto idx = Bm25Index::build(labels, {}, {.k1 = 1.5, .b = 0.75, .length_norm = LengthNorm::kLabelCount});
  const double expected = std::log(1.6) * 2.5 / (1.0 + 1.5 * (0.25 + 0.75 * 3.0 / (7.0 / 3.0)));
  EXPECT_NEAR(idx.score(Tokens{"graph"}, 0), expected, 1e-12);
}

TEST(Bm25Score, MatchesNaiveOracleAndScoreAll) {
  std::mt19937_64 rng(31);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"};
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  std::uniform_int_distribution<std::size_t> len(1, 6);
  std::vector<Label> raw;
  std::vector<Tokens> texts;
  for (int l = 0; l < 12; ++l) {
    std::string name;
    for (std::size_t i = len(rng); i > 0; --i) name += vocab[word(rng)] + " ";
    raw.push_back({"l" + std::to_string(l), {name}, "", 0});
    texts.push_back(tokenize(name));
  }
  const auto labels = make_label_space(raw);
  const auto idx = Bm25Index::build(labels);
  for (int trial = 0; trial < 100; ++trial) {
    Tokens doc;
    for (std::size_t i = len(rng) * 2; i > 0; --i) doc.push_back(vocab[word(rng)]);
    const auto all = idx.score_all(doc);
    for (std::size_t l = 0; l < labels.size(); ++l) {
      EXPECT_NEAR(idx.score(doc, l), oracle::bm25(doc, texts, l), 1e-9);
      EXPECT_EQ(all[l], idx.score(doc, l));
      EXPECT_GE(all[l], 0.0);
    }
  }
}

TEST(ExactMatch, ContiguousRun) {
  const auto labels = toy_labels();
  const Document d{"d", "Mining the web graph today", {}, std::nullopt, {}, std::nullopt};
  EXPECT_EQ(exact_match(d, labels), (std::vector<std::string>{"l1"}));
  const Document split{"d", "web of the graph", {}, std::nullopt, {}, std::nullopt};
  EXPECT_TRUE(exact_match(split, labels).empty());
}

TEST(ExactMatch, AnyNameMatches) {
  const auto labels = make_label_space({{"beta", {"Betacoronavirus", "β-Coronavirus"}, "", 0}});
  const Document d{"d", "a novel β-coronavirus strain", {}, std::nullopt, {}, std::nullopt};
  EXPECT_EQ(exact_match(d, labels), (std::vector<std::string>{"beta"}));
}

TEST(ExactMatch, EmptyDocument) {
  const Document d{"d", "", {}, std::nullopt, {}, std::nullopt};
  EXPECT_TRUE(exact_match(d, toy_labels()).empty());
}

TEST(Retrieve, InfiniteEtaKeepsOnlyExact) {
  const auto labels = toy_labels();
  const Retriever r(labels);
  const Document d{"d", "web graph mining", {}, std::nullopt, {}, std::nullopt};
  const auto c = r.retrieve(d, std::numeric_limits<double>::infinity());
  EXPECT_TRUE(c.bm25.empty());
  EXPECT_EQ(c.all, c.exact);
  EXPECT_EQ(c.exact, (std::vector<std::size_t>{0}));
}

TEST(Retrieve, NegativeEtaKeepsEveryLabel) {
  const auto labels = toy_labels();
  const Retriever r(labels);
  const Document d{"d", "unrelated words", {}, std::nullopt, {}, std::nullopt};
  const auto c = r.retrieve(d, -1.0);
  EXPECT_EQ(c.bm25.size(), 3u);
  EXPECT_EQ(c.all, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Retrieve, NanEtaRejected) {
  const auto labels = toy_labels();
  const Retriever r(labels);
  const Document d{"d", "x", {}, std::nullopt, {}, std::nullopt};
  EXPECT_THROW(r.retrieve(d, std::nan("")), ValidationError);
}

TEST(Retrieve, UnionInvariantsAndMonotoneInEta) {
  const auto labels = toy_labels();
  const Retriever r(labels);
  const Document d{"d", "graph mining of neural web", {}, std::nullopt, {}, std::nullopt};
  std::vector<std::size_t> prev;
  bool first = true;
  for (double eta : {-1.0, 0.0, 0.3, 0.6, 1.0, 5.0}) {
    const auto c = r.retrieve(d, eta);
    std::vector<std::size_t> bm;
    for (const auto& [l, s] : c.bm25) {
      EXPECT_GT(s, eta);
      bm.push_back(l);
      EXPECT_TRUE(std::binary_search(c.all.begin(), c.all.end(), l));
    }
    for (auto l : c.exact) EXPECT_TRUE(std::binary_search(c.all.begin(), c.all.end(), l));
    if (!first) {
      EXPECT_TRUE(std::includes(prev.begin(), prev.end(), bm.begin(), bm.end()));
    }
    prev = bm;
    first = false;
  }
}

TEST(Retrieve, CandidateJsonShape) {
  const auto labels = toy_labels();
  const Retriever r(labels);
  const Document d{"d9", "web graph", {}, std::nullopt, {}, std::nullopt};
  const auto j = candidates_to_json(r.retrieve(d, 0.0), labels);
  EXPECT_EQ(j["paper"], "d9");
  EXPECT_EQ(j["exact"], nlohmann::json({"l1"}));
  ASSERT_FALSE(j["bm25"].empty());
  EXPECT_TRUE(j["bm25"][0].contains("score"));
}

}  // namespace
}  // namespace micol
