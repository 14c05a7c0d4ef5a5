#include <algorithm>
#include <istream>
#include <ostream>
#include <random>
#include <unordered_set>

#include "micol/error.hpp"
#include "micol/hin.hpp"
#include "micol/jsonl.hpp"

namespace micol {
namespace {

struct Eligible {
  DocIndex doc;
  std::vector<std::pair<MetaPattern, std::vector<DocIndex>>> neighborhoods;  // non-empty only
};

std::uint64_t pair_key(DocIndex a, DocIndex p) { return (std::uint64_t{a} << 32) | p; }

}  // namespace

PairSplit sample_pairs(const Hin& h, const std::vector<MetaPattern>& patterns, std::size_t n_train,
                       std::size_t n_val, std::uint64_t seed) {
  if (patterns.empty()) throw ValidationError("sample_pairs needs at least one meta-pattern");

  std::vector<Eligible> eligible;
  for (DocIndex d = 0; d < h.num_papers(); ++d) {
    Eligible e{d, {}};
    for (auto m : patterns) {
      auto n = neighbors(h, d, m);
      if (!n.empty()) e.neighborhoods.emplace_back(m, std::move(n));
    }
    if (!e.neighborhoods.empty()) eligible.push_back(std::move(e));
  }
  PairSplit out;
  if (n_train + n_val == 0) return out;
  if (eligible.empty()) {
    std::string names;
    for (auto m : patterns) {
      if (!names.empty()) names += ",";
      names += pattern_name(m);
    }
    throw SamplingError("no document has a neighbour under " + names);
  }

  std::mt19937_64 rng(seed);
  auto draw = [&] {
    const auto& e = eligible[std::uniform_int_distribution<std::size_t>(0, eligible.size() - 1)(rng)];
    const auto& [m, hood] =
        e.neighborhoods[std::uniform_int_distribution<std::size_t>(0, e.neighborhoods.size() - 1)(rng)];
    auto pos = hood[std::uniform_int_distribution<std::size_t>(0, hood.size() - 1)(rng)];
    return PairSample{e.doc, pos, m};
  };

  std::unordered_set<std::uint64_t> val_keys;
  out.val.reserve(n_val);
  for (std::size_t i = 0; i < n_val; ++i) {
    out.val.push_back(draw());
    val_keys.insert(pair_key(out.val.back().anchor, out.val.back().positive));
  }

  const std::size_t max_rejections = std::max<std::size_t>(1000, 50 * n_train);
  std::size_t rejections = 0;
  out.train.reserve(n_train);
  while (out.train.size() < n_train) {
    auto s = draw();
    if (val_keys.contains(pair_key(s.anchor, s.positive))) {
      if (++rejections > max_rejections) {
        throw SamplingError("cannot draw " + std::to_string(n_train) +
                            " training pairs disjoint from the validation pairs; lower --n-val");
      }
      continue;
    }
    out.train.push_back(s);
  }
  return out;
}

void write_pairs(std::ostream& out, const Hin& h, const std::vector<PairSample>& pairs) {
  for (const auto& p : pairs) {
    json obj = {{"anchor", h.paper_id(p.anchor)},
                {"positive", h.paper_id(p.positive)},
                {"pattern", pattern_name(p.pattern)}};
    out << obj.dump() << '\n';
  }
}

void save_pairs(const std::filesystem::path& path, const Hin& h, const std::vector<PairSample>& pairs) {
  auto out = open_output(path);
  write_pairs(out, h, pairs);
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<PairSample> read_pairs(std::istream& in, const Hin& h, const std::string& source) {
  std::vector<PairSample> pairs;
  for_each_jsonl(in, source, [&](const json& obj, std::size_t line) {
    auto a = require_string(obj, "anchor", source, line);
    auto p = require_string(obj, "positive", source, line);
    auto m = parse_pattern(require_string(obj, "pattern", source, line));
    auto ai = h.find(a);
    auto pi = h.find(p);
    if (!ai || !pi) {
      throw LookupError(source + ":" + std::to_string(line) + ": pair references unknown document \"" +
                        (ai ? p : a) + "\"");
    }
    if (*ai == *pi) throw ValidationError(source + ":" + std::to_string(line) + ": anchor equals positive");
    pairs.push_back({*ai, *pi, m});
  });
  return pairs;
}

std::vector<PairSample> load_pairs(const std::filesystem::path& path, const Hin& h) {
  auto in = open_input(path);
  return read_pairs(in, h, path.string());
}

}  // namespace micol
