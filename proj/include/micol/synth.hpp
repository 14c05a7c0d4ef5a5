#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "micol/corpus.hpp"

namespace micol {

/// Planted-cluster corpus: labels group into clusters; authors and citations
/// follow a document's labels, venues are assigned at random.
struct SynthConfig {
  std::size_t train_docs = 500;
  std::size_t test_docs = 100;
  std::size_t labels = 20;
  std::size_t clusters = 5;
  std::uint64_t seed = 1;
};

struct SynthCorpus {
  std::vector<Label> labels;
  /// Training corpus with labels attached; strip before training.
  std::vector<Document> train;
  std::vector<Document> test;
};

SynthCorpus generate_synthetic(const SynthConfig& cfg);

/// Copy with every `labels` field cleared.
std::vector<Document> strip_labels(std::vector<Document> docs);

/// Writes labels.jsonl, corpus.jsonl (unlabeled), train_truth.jsonl,
/// test.jsonl (unlabeled) and test_truth.jsonl under `dir`.
void write_synthetic(const SynthCorpus& corpus, const std::filesystem::path& dir);

}  // namespace micol
