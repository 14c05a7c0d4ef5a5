#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "micol/error.hpp"
#include "micol/hin.hpp"
#include "oracles/pattern_oracle.hpp"
#include "oracles/random_corpus.hpp"

namespace micol {
namespace {

Document doc(std::string id, std::vector<std::string> authors, std::optional<std::string> venue,
             std::vector<std::string> refs) {
  return {std::move(id), "", std::move(authors), std::move(venue), std::move(refs), std::nullopt};
}

TEST(MetaPatternNames, RoundTrip) {
  for (auto m : kAllPatterns) EXPECT_EQ(parse_pattern(pattern_name(m)), m);
  EXPECT_EQ(pattern_name(MetaPattern::kCoCiting), "P>P<P");
  EXPECT_EQ(pattern_name(MetaPattern::kTwoCoCiters), "P<(PP)>P");
  EXPECT_THROW(parse_pattern("PXP"), ValidationError);
}

TEST(MetaPatternNames, ListParsing) {
  EXPECT_EQ(parse_pattern_list("PAP, P>P<P,PAP"),
            (std::vector<MetaPattern>{MetaPattern::kCoAuthor, MetaPattern::kCoCiting}));
  EXPECT_THROW(parse_pattern_list(""), ValidationError);
}

TEST(BuildHin, SingleCitationAndInverse) {
  const auto h = Hin::build({doc("d1", {}, std::nullopt, {"d2"}), doc("d2", {}, std::nullopt, {})});
  EXPECT_EQ(h.cites(h.index_of("d1")), (std::vector<DocIndex>{h.index_of("d2")}));
  EXPECT_EQ(h.cited_by(h.index_of("d2")), (std::vector<DocIndex>{h.index_of("d1")}));
}

TEST(BuildHin, VenueMembership) {
  const auto h = Hin::build({doc("d1", {}, "WWW", {}), doc("d2", {}, "KDD", {})});
  const auto v = h.venue(h.index_of("d1"));
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(h.venue_id(*v), "WWW");
  EXPECT_EQ(h.papers_in_venue(*v), (std::vector<DocIndex>{h.index_of("d1")}));
}

TEST(BuildHin, DanglingReferenceOmitted) {
  const auto h = Hin::build({doc("d1", {}, std::nullopt, {"nowhere"})});
  EXPECT_TRUE(h.cites(0).empty());
  EXPECT_EQ(h.num_cite_edges(), 0u);
}

TEST(BuildHin, InverseConsistency) {
  std::mt19937_64 rng(7);
  const auto docs = oracle::random_corpus(rng, {});
  const auto h = Hin::build(docs);
  for (DocIndex d = 0; d < h.num_papers(); ++d) {
    for (auto a : h.authors(d)) {
      const auto& back = h.papers_by_author(a);
      EXPECT_TRUE(std::binary_search(back.begin(), back.end(), d));
    }
    for (auto c : h.cites(d)) {
      const auto& back = h.cited_by(c);
      EXPECT_TRUE(std::binary_search(back.begin(), back.end(), d));
    }
    if (auto v = h.venue(d)) {
      const auto& back = h.papers_in_venue(*v);
      EXPECT_TRUE(std::binary_search(back.begin(), back.end(), d));
    }
  }
  for (std::uint32_t a = 0; a < h.num_authors(); ++a) {
    for (auto d : h.papers_by_author(a)) {
      const auto& fwd = h.authors(d);
      EXPECT_TRUE(std::find(fwd.begin(), fwd.end(), a) != fwd.end());
    }
  }
}

TEST(BuildHin, JsonRoundTrip) {
  std::mt19937_64 rng(11);
  const auto h = Hin::build(oracle::random_corpus(rng, {}));
  const auto back = Hin::from_json(h.to_json());
  EXPECT_EQ(back.to_json(), h.to_json());
  EXPECT_EQ(back.stats(), h.stats());
}

TEST(BuildHin, FromJsonRejectsUnknownNodes) {
  nlohmann::json j = {{"version", 1},     {"papers", {"d1"}}, {"authors", nlohmann::json::array()},
                      {"venues", nlohmann::json::array()}, {"writes", {{0, 5}}},
                      {"published_in", nlohmann::json::array()}, {"cites", nlohmann::json::array()}};
  EXPECT_THROW(Hin::from_json(j), ValidationError);
}

TEST(Reachability, TwoSharedAuthors) {
  const auto h = Hin::build({doc("doc1", {"tomkins", "kumar"}, std::nullopt, {}),
                             doc("doc2", {"tomkins", "kumar", "raghavan"}, std::nullopt, {})});
  EXPECT_TRUE(is_reachable(h, "doc1", "doc2", MetaPattern::kTwoCoAuthors));
  EXPECT_TRUE(is_reachable(h, "doc1", "doc2", MetaPattern::kCoAuthor));
  EXPECT_EQ(neighbors(h, "doc1", MetaPattern::kTwoCoAuthors), (std::vector<DocIndex>{1}));
}

TEST(Reachability, SelfIsPreconditionError) {
  const auto h = Hin::build({doc("d1", {"a"}, std::nullopt, {})});
  EXPECT_THROW(is_reachable(h, "d1", "d1", MetaPattern::kCoAuthor), PreconditionError);
}

TEST(Reachability, UnknownIdIsLookupError) {
  const auto h = Hin::build({doc("d1", {"a"}, std::nullopt, {})});
  EXPECT_THROW(is_reachable(h, "d1", "zz", MetaPattern::kCoAuthor), LookupError);
  EXPECT_THROW(neighbors(h, "zz", MetaPattern::kCoAuthor), LookupError);
}

TEST(Reachability, NullVenueMatchesNothing) {
  const auto h = Hin::build({doc("d1", {"a"}, std::nullopt, {}), doc("d2", {"a"}, std::nullopt, {})});
  EXPECT_FALSE(is_reachable(h, "d1", "d2", MetaPattern::kCoVenue));
  EXPECT_FALSE(is_reachable(h, "d1", "d2", MetaPattern::kCoAuthorCoVenue));
}

TEST(Reachability, IsolatedDocumentHasNoNeighbours) {
  const auto h = Hin::build({doc("d1", {"a"}, "v", {"d2"}), doc("d2", {"a"}, "v", {}), doc("lone", {}, std::nullopt, {})});
  for (auto m : kAllPatterns) EXPECT_TRUE(neighbors(h, "lone", m).empty()) << pattern_name(m);
}

TEST(Reachability, CitationDirections) {
  // d1 and d2 both cite c1 and c2; e1 and e2 both cite d1.
  const auto h = Hin::build({doc("d1", {}, std::nullopt, {"c1", "c2"}), doc("d2", {}, std::nullopt, {"c1", "c2"}),
                             doc("c1", {}, std::nullopt, {}), doc("c2", {}, std::nullopt, {}),
                             doc("e1", {}, std::nullopt, {"d1", "d2"}), doc("e2", {}, std::nullopt, {"d1", "d2"})});
  EXPECT_TRUE(is_reachable(h, "d1", "c1", MetaPattern::kCites));
  EXPECT_FALSE(is_reachable(h, "c1", "d1", MetaPattern::kCites));
  EXPECT_TRUE(is_reachable(h, "c1", "d1", MetaPattern::kCitedBy));
  EXPECT_TRUE(is_reachable(h, "d1", "d2", MetaPattern::kCoCiting));
  EXPECT_TRUE(is_reachable(h, "d1", "d2", MetaPattern::kTwoCoCitations));
  EXPECT_TRUE(is_reachable(h, "c1", "c2", MetaPattern::kCoCited));
  EXPECT_TRUE(is_reachable(h, "d1", "d2", MetaPattern::kTwoCoCiters));
  EXPECT_FALSE(is_reachable(h, "e1", "c1", MetaPattern::kCoCiting));
}

TEST(Reachability, AgreesWithExhaustiveEnumeration) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 8; ++trial) {
    oracle::RandomCorpusSpec spec;
    spec.papers = 15 + static_cast<std::size_t>(trial);
    const auto docs = oracle::random_corpus(rng, spec);
    const auto h = Hin::build(docs);
    const oracle::BruteNetwork brute(docs);
    for (auto m : kAllPatterns) {
      for (DocIndex s = 0; s < h.num_papers(); ++s) {
        const auto hood = neighbors(h, s, m);
        for (DocIndex t = 0; t < h.num_papers(); ++t) {
          if (s == t) continue;
          const bool expected = brute.reachable(static_cast<int>(s), static_cast<int>(t), m);
          ASSERT_EQ(is_reachable(h, s, t, m), expected) << pattern_name(m) << " " << s << "->" << t;
          ASSERT_EQ(std::binary_search(hood.begin(), hood.end(), t), expected);
        }
        ASSERT_FALSE(std::binary_search(hood.begin(), hood.end(), s));
      }
    }
  }
}

TEST(Reachability, SymmetryTransposeAndMonotonicity) {
  std::mt19937_64 rng(99);
  const auto h = Hin::build(oracle::random_corpus(rng, {.papers = 30, .cite_prob = 0.2}));
  for (DocIndex s = 0; s < h.num_papers(); ++s) {
    for (DocIndex t = 0; t < h.num_papers(); ++t) {
      if (s == t) continue;
      for (auto m : kAllPatterns) {
        if (is_symmetric(m)) {
          EXPECT_EQ(is_reachable(h, s, t, m), is_reachable(h, t, s, m));
        }
      }
      EXPECT_EQ(is_reachable(h, s, t, MetaPattern::kCites), is_reachable(h, t, s, MetaPattern::kCitedBy));
      auto implies = [&](MetaPattern a, MetaPattern b) {
        if (is_reachable(h, s, t, a)) {
          EXPECT_TRUE(is_reachable(h, s, t, b));
        }
      };
      implies(MetaPattern::kTwoCoAuthors, MetaPattern::kCoAuthor);
      implies(MetaPattern::kTwoCoCitations, MetaPattern::kCoCiting);
      implies(MetaPattern::kTwoCoCiters, MetaPattern::kCoCited);
      implies(MetaPattern::kCoAuthorCoVenue, MetaPattern::kCoAuthor);
      implies(MetaPattern::kCoAuthorCoVenue, MetaPattern::kCoVenue);
    }
  }
}

TEST(SamplePairs, ForcedOutcome) {
  const auto h = Hin::build({doc("d1", {}, std::nullopt, {"d2"}), doc("d2", {}, std::nullopt, {})});
  const auto split = sample_pairs(h, {MetaPattern::kCites}, 1, 0, 5);
  ASSERT_EQ(split.train.size(), 1u);
  EXPECT_EQ(split.train[0], (PairSample{0, 1, MetaPattern::kCites}));
  EXPECT_TRUE(split.val.empty());
}

TEST(SamplePairs, NoEligibleDocumentIsSamplingError) {
  const auto h = Hin::build({doc("d1", {"a"}, std::nullopt, {}), doc("d2", {"b"}, std::nullopt, {})});
  EXPECT_THROW(sample_pairs(h, {MetaPattern::kCoAuthor}, 3, 1, 0), SamplingError);
}

TEST(SamplePairs, DeterministicValidAndDisjoint) {
  std::mt19937_64 rng(3);
  const auto h = Hin::build(oracle::random_corpus(rng, {.papers = 40, .cite_prob = 0.1}));
  const std::vector<MetaPattern> patterns = {MetaPattern::kCoAuthor, MetaPattern::kCoCiting, MetaPattern::kCitedBy};
  const auto a = sample_pairs(h, patterns, 300, 40, 17);
  const auto b = sample_pairs(h, patterns, 300, 40, 17);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.val, b.val);
  EXPECT_EQ(a.train.size(), 300u);
  EXPECT_EQ(a.val.size(), 40u);
  std::set<std::pair<DocIndex, DocIndex>> val;
  for (const auto& p : a.val) val.insert({p.anchor, p.positive});
  for (const auto& p : a.train) EXPECT_FALSE(val.contains({p.anchor, p.positive}));
  for (const auto* split : {&a.train, &a.val}) {
    for (const auto& p : *split) {
      EXPECT_NE(p.anchor, p.positive);
      EXPECT_TRUE(is_reachable(h, p.anchor, p.positive, p.pattern));
      EXPECT_TRUE(std::find(patterns.begin(), patterns.end(), p.pattern) != patterns.end());
    }
  }
  const auto c = sample_pairs(h, patterns, 300, 40, 18);
  EXPECT_NE(a.train, c.train);
}

TEST(SamplePairs, JsonlRoundTripAndUnknownIds) {
  std::mt19937_64 rng(5);
  const auto h = Hin::build(oracle::random_corpus(rng, {}));
  const auto split = sample_pairs(h, {MetaPattern::kCoAuthor}, 20, 0, 1);
  std::stringstream buf;
  write_pairs(buf, h, split.train);
  EXPECT_EQ(read_pairs(buf, h), split.train);
  std::istringstream bad(R"({"anchor":"p0","positive":"ghost","pattern":"PAP"})");
  EXPECT_THROW(read_pairs(bad, h), LookupError);
}

}  // namespace
}  // namespace micol
