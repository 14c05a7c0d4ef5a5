#pragma once

// First-principles JS divergence for one document: builds the neighbourhood
// and label-overlap distributions explicitly and compares them.

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "micol/corpus.hpp"
#include "oracles/js_oracle.hpp"
#include "oracles/pattern_oracle.hpp"
#include "oracles/random_corpus.hpp"

namespace oracle {

/// Random corpus where each paper has 0-2 labels from {A, B, C, D}.
inline std::vector<micol::Document> labeled_random_corpus(std::mt19937_64& rng, const RandomCorpusSpec& spec) {
  auto docs = random_corpus(rng, spec);
  const char* names[] = {"A", "B", "C", "D"};
  std::uniform_int_distribution<int> count(0, 2), pick(0, 3);
  for (auto& d : docs) {
    std::vector<std::string> labels;
    for (int i = count(rng); i > 0; --i) {
      std::string l = names[pick(rng)];
      if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
    }
    d.labels = labels;
  }
  return docs;
}

struct JsCase {
  std::size_t x = 0;
  std::size_t y = 0;
  std::optional<double> js;
};

/// Universe: papers with a non-empty label list. `d` indexes `docs`.
inline JsCase first_principles_js(const std::vector<micol::Document>& docs, const BruteNetwork& net,
                                  std::size_t d, micol::MetaPattern m) {
  auto labeled = [&](std::size_t i) { return docs[i].labels && !docs[i].labels->empty(); };
  auto shares = [&](std::size_t i) {
    for (const auto& a : *docs[d].labels) {
      for (const auto& b : *docs[i].labels) {
        if (a == b) return true;
      }
    }
    return false;
  };
  std::vector<std::size_t> reach, overlap;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (i == d || !labeled(i)) continue;
    if (net.reachable(static_cast<int>(d), static_cast<int>(i), m)) reach.push_back(i);
    if (shares(i)) overlap.push_back(i);
  }
  JsCase c{reach.size(), overlap.size(), std::nullopt};
  if (!reach.empty() && !overlap.empty()) c.js = js_uniform(docs.size(), reach, overlap);
  return c;
}

}  // namespace oracle
