#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "micol/corpus.hpp"
#include <json.hpp>

namespace micol {

/// The ten document-to-document relations over papers (P), authors (A) and
/// venues (V). Arrows follow citation direction: in `P>P` the source paper
/// cites the target.
enum class MetaPattern : std::uint8_t {
  kCites,             // P>P
  kCitedBy,           // P<P
  kCoAuthor,          // PAP
  kCoVenue,           // PVP
  kCoCiting,          // P>P<P   (bibliographic coupling)
  kCoCited,           // P<P>P   (co-citation)
  kTwoCoAuthors,      // P(AA)P
  kCoAuthorCoVenue,   // P(AV)P
  kTwoCoCitations,    // P>(PP)<P
  kTwoCoCiters,       // P<(PP)>P
};

inline constexpr std::array<MetaPattern, 10> kAllPatterns = {
    MetaPattern::kCites,        MetaPattern::kCitedBy,         MetaPattern::kCoAuthor,
    MetaPattern::kCoVenue,      MetaPattern::kCoCiting,        MetaPattern::kCoCited,
    MetaPattern::kTwoCoAuthors, MetaPattern::kCoAuthorCoVenue, MetaPattern::kTwoCoCitations,
    MetaPattern::kTwoCoCiters,
};

/// ASCII name used on the command line and in pair files.
std::string_view pattern_name(MetaPattern m);
/// Throws ValidationError for an unknown name.
MetaPattern parse_pattern(std::string_view name);
/// Comma-separated list, e.g. "PAP,P>P<P". Duplicates are dropped.
std::vector<MetaPattern> parse_pattern_list(std::string_view names);
bool is_symmetric(MetaPattern m);

using DocIndex = std::uint32_t;

/// Typed adjacency over papers, authors and venues, with every inverse.
/// Papers are indexed in corpus order. All neighbour lists are sorted and
/// duplicate-free. Citation edges only join papers that are both in the
/// corpus.
class Hin {
 public:
  static Hin build(const std::vector<Document>& docs);

  std::size_t num_papers() const noexcept { return paper_ids_.size(); }
  std::size_t num_authors() const noexcept { return author_ids_.size(); }
  std::size_t num_venues() const noexcept { return venue_ids_.size(); }
  std::size_t num_writes_edges() const;
  std::size_t num_published_edges() const;
  std::size_t num_cite_edges() const;

  const std::string& paper_id(DocIndex d) const { return paper_ids_.at(d); }
  const std::string& author_id(std::uint32_t a) const { return author_ids_.at(a); }
  const std::string& venue_id(std::uint32_t v) const { return venue_ids_.at(v); }
  /// Throws LookupError for an unknown id.
  DocIndex index_of(const std::string& paper) const;
  std::optional<DocIndex> find(const std::string& paper) const;

  const std::vector<std::uint32_t>& authors(DocIndex d) const { return paper_authors_.at(d); }
  const std::vector<DocIndex>& papers_by_author(std::uint32_t a) const { return author_papers_.at(a); }
  std::optional<std::uint32_t> venue(DocIndex d) const;
  const std::vector<DocIndex>& papers_in_venue(std::uint32_t v) const { return venue_papers_.at(v); }
  const std::vector<DocIndex>& cites(DocIndex d) const { return cites_.at(d); }
  const std::vector<DocIndex>& cited_by(DocIndex d) const { return cited_by_.at(d); }

  nlohmann::json to_json() const;
  /// Throws ValidationError when the edge lists reference unknown nodes.
  static Hin from_json(const nlohmann::json& j);
  /// Node and edge counts per type.
  nlohmann::json stats() const;

 private:
  static constexpr std::uint32_t kNoVenue = UINT32_MAX;
  void finalize();

  std::vector<std::string> paper_ids_;
  std::vector<std::string> author_ids_;
  std::vector<std::string> venue_ids_;
  std::unordered_map<std::string, DocIndex> paper_index_;

  std::vector<std::vector<std::uint32_t>> paper_authors_;
  std::vector<std::vector<DocIndex>> author_papers_;
  std::vector<std::uint32_t> paper_venue_;
  std::vector<std::vector<DocIndex>> venue_papers_;
  std::vector<std::vector<DocIndex>> cites_;
  std::vector<std::vector<DocIndex>> cited_by_;
};

/// True iff `target` is reachable from `source` via `m`. Throws
/// PreconditionError when source == target.
bool is_reachable(const Hin& h, DocIndex source, DocIndex target, MetaPattern m);
bool is_reachable(const Hin& h, const std::string& source, const std::string& target,
                  MetaPattern m);

/// N_M(d): every other paper reachable from `d`, sorted ascending. Built from
/// the inverse adjacency lists of `d`'s own neighbourhood.
std::vector<DocIndex> neighbors(const Hin& h, DocIndex d, MetaPattern m);
std::vector<DocIndex> neighbors(const Hin& h, const std::string& d, MetaPattern m);

struct PairSample {
  DocIndex anchor;
  DocIndex positive;
  MetaPattern pattern;

  bool operator==(const PairSample&) const = default;
};

struct PairSplit {
  std::vector<PairSample> train;
  std::vector<PairSample> val;
};

/// Draws anchors uniformly (with replacement) among papers that have a
/// neighbour under at least one of `patterns`; per anchor, one pattern with a
/// non-empty neighbourhood is chosen uniformly, then one positive uniformly
/// from it. No (anchor, positive) pair appears in both splits.
PairSplit sample_pairs(const Hin& h, const std::vector<MetaPattern>& patterns,
                       std::size_t n_train, std::size_t n_val, std::uint64_t seed);

void write_pairs(std::ostream& out, const Hin& h, const std::vector<PairSample>& pairs);
void save_pairs(const std::filesystem::path& path, const Hin& h,
                const std::vector<PairSample>& pairs);
/// Pairs whose ids are missing from `h` raise LookupError.
std::vector<PairSample> read_pairs(std::istream& in, const Hin& h,
                                   const std::string& source = "<stream>");
std::vector<PairSample> load_pairs(const std::filesystem::path& path, const Hin& h);

}  // namespace micol
