#include "micol/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <string>
#include <unordered_set>

#include "micol/error.hpp"

namespace micol {
namespace {

constexpr std::size_t kKeywordsPerLabel = 3;  // name plus description words
constexpr std::size_t kTopicWordsPerLabel = 12;
constexpr std::size_t kClusterWords = 15;
constexpr std::size_t kNoiseWords = 300;
constexpr std::size_t kAuthorsPerLabel = 6;
constexpr std::size_t kVenues = 10;

constexpr double kTopicShare = 0.40;
constexpr double kClusterShare = 0.15;
// Probability that a document mentions one of its own label keywords, and
// that it mentions keywords of 1-2 labels from other clusters.
constexpr double kOwnKeywordProb = 0.9;
constexpr double kDistractorProb = 0.9;
constexpr std::size_t kMaxDistractorLabels = 2;
constexpr double kSecondaryLabelProb = 0.3;

std::string pad(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%04zu", prefix, i);
  return buf;
}

class WordFactory {
 public:
  explicit WordFactory(std::mt19937_64& rng) : rng_(rng) {}

  std::string next() {
    static constexpr std::string_view kOnsets = "bcdfgklmnprstvz";
    static constexpr std::string_view kVowels = "aeiou";
    std::uniform_int_distribution<std::size_t> onset(0, kOnsets.size() - 1);
    std::uniform_int_distribution<std::size_t> vowel(0, kVowels.size() - 1);
    std::uniform_int_distribution<int> syllables(2, 4);
    for (;;) {
      std::string w;
      for (int s = syllables(rng_); s > 0; --s) {
        w += kOnsets[onset(rng_)];
        w += kVowels[vowel(rng_)];
      }
      if (used_.insert(w).second) return w;
    }
  }

  std::vector<std::string> batch(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(next());
    return out;
  }

 private:
  std::mt19937_64& rng_;
  std::unordered_set<std::string> used_;
};

struct Vocab {
  std::vector<std::vector<std::string>> keywords;  // per label
  std::vector<std::vector<std::string>> topics;    // per label
  std::vector<std::vector<std::string>> cluster;   // per cluster
  std::vector<std::string> noise;
};

template <class T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

class Generator {
 public:
  explicit Generator(const SynthConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    if (cfg.labels == 0 || cfg.clusters == 0 || cfg.clusters > cfg.labels) {
      throw ValidationError("synth needs 1 <= clusters <= labels");
    }
    if (cfg.train_docs == 0) throw ValidationError("synth needs at least one training document");
    WordFactory words(rng_);
    for (std::size_t l = 0; l < cfg.labels; ++l) {
      vocab_.keywords.push_back(words.batch(kKeywordsPerLabel));
      vocab_.topics.push_back(words.batch(kTopicWordsPerLabel));
    }
    for (std::size_t c = 0; c < cfg.clusters; ++c) vocab_.cluster.push_back(words.batch(kClusterWords));
    vocab_.noise = words.batch(kNoiseWords);

    for (std::size_t l = 0; l < cfg.labels; ++l) {
      std::vector<std::string> pool;
      for (std::size_t a = 0; a < kAuthorsPerLabel; ++a) pool.push_back(pad("a", l * kAuthorsPerLabel + a));
      author_pools_.push_back(std::move(pool));
    }
    for (std::size_t v = 0; v < kVenues; ++v) venues_.push_back(pad("v", v));
  }

  std::vector<Label> labels() const {
    std::vector<Label> out;
    for (std::size_t l = 0; l < cfg_.labels; ++l) {
      const auto& kw = vocab_.keywords[l];
      Label label;
      label.id = pad("L", l);
      label.names = {kw[0]};
      for (std::size_t i = 1; i < kw.size(); ++i) {
        if (i > 1) label.description += ' ';
        label.description += kw[i];
      }
      out.push_back(std::move(label));
    }
    return out;
  }

  std::vector<Document> documents(const char* prefix, std::size_t n, const std::vector<Document>* cite_pool) {
    std::vector<Document> docs;
    std::vector<std::vector<std::size_t>> by_label(cfg_.labels);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t primary = i % cfg_.labels;
      std::vector<std::size_t> own = {primary};
      const std::size_t c = primary % cfg_.clusters;
      const std::size_t cluster_size = (cfg_.labels - 1 - c) / cfg_.clusters + 1;
      if (cluster_size > 1 && coin(kSecondaryLabelProb)) {
        std::size_t other;
        do {
          other = c + cfg_.clusters * uniform(0, cluster_size - 1);
        } while (other == primary);
        own.push_back(other);
      }

      Document d;
      d.id = pad(prefix, i);
      d.text = text(own);
      d.authors = authors(primary);
      d.venue = pick(venues_, rng_);
      d.references = references(primary, i, by_label, docs, cite_pool);
      std::vector<std::string> ids;
      for (auto l : own) ids.push_back(pad("L", l));
      d.labels = std::move(ids);
      for (auto l : own) by_label[l].push_back(i);
      docs.push_back(std::move(d));
    }
    return docs;
  }

 private:
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  std::string text(const std::vector<std::size_t>& own) {
    const std::size_t c = own.front() % cfg_.clusters;
    const std::size_t length = uniform(40, 60);
    std::vector<std::string> tokens;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t t = 0; t < length; ++t) {
      const double r = u(rng_);
      if (r < kTopicShare) {
        tokens.push_back(pick(vocab_.topics[own[uniform(0, own.size() - 1)]], rng_));
      } else if (r < kTopicShare + kClusterShare) {
        tokens.push_back(pick(vocab_.cluster[c], rng_));
      } else {
        tokens.push_back(pick(vocab_.noise, rng_));
      }
    }
    auto insert = [&](const std::string& w) {
      tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(uniform(0, tokens.size())), w);
    };
    if (coin(kOwnKeywordProb)) insert(pick(vocab_.keywords[own[uniform(0, own.size() - 1)]], rng_));
    if (cfg_.clusters > 1 && coin(kDistractorProb)) {
      for (std::size_t n = uniform(1, kMaxDistractorLabels); n > 0; --n) {
        std::size_t other;
        do {
          other = uniform(0, cfg_.labels - 1);
        } while (other % cfg_.clusters == c);
        insert(pick(vocab_.keywords[other], rng_));
      }
    }
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i > 0) out += ' ';
      out += tokens[i];
    }
    return out;
  }

  std::vector<std::string> authors(std::size_t primary) {
    std::vector<std::string> out;
    for (std::size_t n = uniform(2, 3); out.size() < n;) {
      const auto& a = pick(author_pools_[primary], rng_);
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    }
    return out;
  }

  // Train documents cite earlier documents of their own label where possible;
  // test documents cite into the training corpus.
  std::vector<std::string> references(std::size_t primary, std::size_t i,
                                      const std::vector<std::vector<std::size_t>>& by_label,
                                      const std::vector<Document>& earlier, const std::vector<Document>* pool) {
    std::vector<std::string> out;
    const std::size_t n = uniform(2, 4);
    for (std::size_t r = 0; r < n; ++r) {
      std::string target;
      if (pool) {
        if (pool->empty()) break;
        const auto& cand = (*pool)[uniform(0, pool->size() - 1)];
        target = cand.id;
        for (int tries = 0; tries < 8; ++tries) {
          const auto& c = (*pool)[uniform(0, pool->size() - 1)];
          if (c.labels && !c.labels->empty() && c.labels->front() == pad("L", primary)) {
            target = c.id;
            break;
          }
        }
      } else {
        if (i == 0) break;
        const auto& same = by_label[primary];
        target = (!same.empty() && coin(0.8)) ? earlier[pick(same, rng_)].id : earlier[uniform(0, i - 1)].id;
      }
      if (std::find(out.begin(), out.end(), target) == out.end()) out.push_back(target);
    }
    return out;
  }

  SynthConfig cfg_;
  std::mt19937_64 rng_;
  Vocab vocab_;
  std::vector<std::vector<std::string>> author_pools_;
  std::vector<std::string> venues_;
};

}  // namespace

SynthCorpus generate_synthetic(const SynthConfig& cfg) {
  Generator g(cfg);
  SynthCorpus out;
  out.labels = g.labels();
  out.train = g.documents("p", cfg.train_docs, nullptr);
  out.test = g.documents("t", cfg.test_docs, &out.train);
  return out;
}

std::vector<Document> strip_labels(std::vector<Document> docs) {
  for (auto& d : docs) d.labels.reset();
  return docs;
}

void write_synthetic(const SynthCorpus& corpus, const std::filesystem::path& dir) {
  save_labels(dir / "labels.jsonl", corpus.labels);
  save_documents(dir / "corpus.jsonl", strip_labels(corpus.train));
  save_documents(dir / "train_truth.jsonl", corpus.train);
  save_documents(dir / "test.jsonl", strip_labels(corpus.test));
  save_documents(dir / "test_truth.jsonl", corpus.test);
}

}  // namespace micol
