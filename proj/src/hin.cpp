#include "micol/hin.hpp"

#include <algorithm>

#include "micol/error.hpp"

namespace micol {
namespace {

struct PatternInfo {
  MetaPattern pattern;
  std::string_view name;
};

constexpr PatternInfo kPatternInfo[] = {
    {MetaPattern::kCites, "P>P"},
    {MetaPattern::kCitedBy, "P<P"},
    {MetaPattern::kCoAuthor, "PAP"},
    {MetaPattern::kCoVenue, "PVP"},
    {MetaPattern::kCoCiting, "P>P<P"},
    {MetaPattern::kCoCited, "P<P>P"},
    {MetaPattern::kTwoCoAuthors, "P(AA)P"},
    {MetaPattern::kCoAuthorCoVenue, "P(AV)P"},
    {MetaPattern::kTwoCoCitations, "P>(PP)<P"},
    {MetaPattern::kTwoCoCiters, "P<(PP)>P"},
};

template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// |a ∩ b| for sorted ranges, stopping once `cap` is reached.
template <typename T>
std::size_t intersection_size(const std::vector<T>& a, const std::vector<T>& b, std::size_t cap) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end() && n < cap) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

// Papers reached from `d` through a shared intermediate at least
// `min_shared` times: for each intermediate x in `via`, every paper in
// `back(x)` is counted once.
template <typename Via, typename Back>
std::vector<DocIndex> count_through(DocIndex d, const Via& via, Back&& back, std::size_t min_shared) {
  std::unordered_map<DocIndex, std::uint32_t> counts;
  for (auto x : via) {
    for (DocIndex other : back(x)) {
      if (other != d) ++counts[other];
    }
  }
  std::vector<DocIndex> out;
  for (auto [p, c] : counts) {
    if (c >= min_shared) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string_view pattern_name(MetaPattern m) {
  for (const auto& info : kPatternInfo) {
    if (info.pattern == m) return info.name;
  }
  throw InvariantError("unknown meta-pattern value");
}

MetaPattern parse_pattern(std::string_view name) {
  for (const auto& info : kPatternInfo) {
    if (info.name == name) return info.pattern;
  }
  std::string known;
  for (const auto& info : kPatternInfo) {
    if (!known.empty()) known += ", ";
    known += info.name;
  }
  throw ValidationError("unknown meta-pattern \"" + std::string(name) + "\" (known: " + known + ")");
}

std::vector<MetaPattern> parse_pattern_list(std::string_view names) {
  std::vector<MetaPattern> out;
  std::size_t start = 0;
  while (start <= names.size()) {
    auto end = names.find(',', start);
    if (end == std::string_view::npos) end = names.size();
    auto item = names.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      auto m = parse_pattern(item);
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    start = end + 1;
  }
  if (out.empty()) throw ValidationError("empty meta-pattern list");
  return out;
}

bool is_symmetric(MetaPattern m) {
  return m != MetaPattern::kCites && m != MetaPattern::kCitedBy;
}

Hin Hin::build(const std::vector<Document>& docs) {
  Hin h;
  h.paper_ids_.reserve(docs.size());
  for (DocIndex i = 0; i < docs.size(); ++i) {
    h.paper_ids_.push_back(docs[i].id);
    if (!h.paper_index_.emplace(docs[i].id, i).second) {
      throw ValidationError("duplicate document id \"" + docs[i].id + "\"");
    }
  }

  std::unordered_map<std::string, std::uint32_t> author_index;
  std::unordered_map<std::string, std::uint32_t> venue_index;
  h.paper_authors_.resize(docs.size());
  h.paper_venue_.assign(docs.size(), kNoVenue);
  h.cites_.resize(docs.size());
  for (DocIndex i = 0; i < docs.size(); ++i) {
    const auto& d = docs[i];
    for (const auto& a : d.authors) {
      auto [it, inserted] = author_index.emplace(a, static_cast<std::uint32_t>(h.author_ids_.size()));
      if (inserted) h.author_ids_.push_back(a);
      h.paper_authors_[i].push_back(it->second);
    }
    if (d.venue) {
      auto [it, inserted] = venue_index.emplace(*d.venue, static_cast<std::uint32_t>(h.venue_ids_.size()));
      if (inserted) h.venue_ids_.push_back(*d.venue);
      h.paper_venue_[i] = it->second;
    }
    for (const auto& r : d.references) {
      auto it = h.paper_index_.find(r);
      if (it != h.paper_index_.end() && it->second != i) h.cites_[i].push_back(it->second);
    }
  }
  h.finalize();
  return h;
}

void Hin::finalize() {
  const auto n = paper_ids_.size();
  author_papers_.assign(author_ids_.size(), {});
  venue_papers_.assign(venue_ids_.size(), {});
  cited_by_.assign(n, {});
  for (DocIndex i = 0; i < n; ++i) {
    sort_unique(paper_authors_[i]);
    sort_unique(cites_[i]);
    for (auto a : paper_authors_[i]) author_papers_[a].push_back(i);
    if (paper_venue_[i] != kNoVenue) venue_papers_[paper_venue_[i]].push_back(i);
    for (auto c : cites_[i]) cited_by_[c].push_back(i);
  }
  // Papers are visited in ascending order, so the inverse lists are sorted.
}

std::size_t Hin::num_writes_edges() const {
  std::size_t n = 0;
  for (const auto& v : paper_authors_) n += v.size();
  return n;
}

std::size_t Hin::num_published_edges() const {
  return static_cast<std::size_t>(
      std::count_if(paper_venue_.begin(), paper_venue_.end(), [](auto v) { return v != kNoVenue; }));
}

std::size_t Hin::num_cite_edges() const {
  std::size_t n = 0;
  for (const auto& v : cites_) n += v.size();
  return n;
}

DocIndex Hin::index_of(const std::string& paper) const {
  auto it = paper_index_.find(paper);
  if (it == paper_index_.end()) throw LookupError("unknown document id \"" + paper + "\"");
  return it->second;
}

std::optional<DocIndex> Hin::find(const std::string& paper) const {
  auto it = paper_index_.find(paper);
  if (it == paper_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> Hin::venue(DocIndex d) const {
  auto v = paper_venue_.at(d);
  if (v == kNoVenue) return std::nullopt;
  return v;
}

nlohmann::json Hin::to_json() const {
  nlohmann::json writes = nlohmann::json::array();
  nlohmann::json published = nlohmann::json::array();
  nlohmann::json cites = nlohmann::json::array();
  for (DocIndex i = 0; i < paper_ids_.size(); ++i) {
    for (auto a : paper_authors_[i]) writes.push_back({i, a});
    if (paper_venue_[i] != kNoVenue) published.push_back({i, paper_venue_[i]});
    for (auto c : cites_[i]) cites.push_back({i, c});
  }
  return {{"version", 1},        {"papers", paper_ids_}, {"authors", author_ids_},
          {"venues", venue_ids_}, {"writes", writes},     {"published_in", published},
          {"cites", cites}};
}

Hin Hin::from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != 1) throw ValidationError("unsupported network file version");
    Hin h;
    h.paper_ids_ = j.at("papers").get<std::vector<std::string>>();
    h.author_ids_ = j.at("authors").get<std::vector<std::string>>();
    h.venue_ids_ = j.at("venues").get<std::vector<std::string>>();
    const auto n = h.paper_ids_.size();
    for (DocIndex i = 0; i < n; ++i) {
      if (!h.paper_index_.emplace(h.paper_ids_[i], i).second) {
        throw ValidationError("duplicate paper id \"" + h.paper_ids_[i] + "\" in network file");
      }
    }
    h.paper_authors_.resize(n);
    h.paper_venue_.assign(n, kNoVenue);
    h.cites_.resize(n);
    auto check = [](std::size_t v, std::size_t bound, const char* what) {
      if (v >= bound) throw ValidationError(std::string("network file: ") + what + " index out of range");
    };
    for (const auto& e : j.at("writes")) {
      auto p = e.at(0).get<std::size_t>(), a = e.at(1).get<std::size_t>();
      check(p, n, "paper");
      check(a, h.author_ids_.size(), "author");
      h.paper_authors_[p].push_back(static_cast<std::uint32_t>(a));
    }
    for (const auto& e : j.at("published_in")) {
      auto p = e.at(0).get<std::size_t>(), v = e.at(1).get<std::size_t>();
      check(p, n, "paper");
      check(v, h.venue_ids_.size(), "venue");
      if (h.paper_venue_[p] != kNoVenue) throw ValidationError("network file: paper with two venues");
      h.paper_venue_[p] = static_cast<std::uint32_t>(v);
    }
    for (const auto& e : j.at("cites")) {
      auto p = e.at(0).get<std::size_t>(), q = e.at(1).get<std::size_t>();
      check(p, n, "paper");
      check(q, n, "paper");
      if (p == q) throw ValidationError("network file: self-citation");
      h.cites_[p].push_back(static_cast<DocIndex>(q));
    }
    h.finalize();
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed network file: ") + e.what());
  }
}

nlohmann::json Hin::stats() const {
  return {{"nodes", {{"paper", num_papers()}, {"author", num_authors()}, {"venue", num_venues()}}},
          {"edges",
           {{"paper-author", num_writes_edges()},
            {"paper-venue", num_published_edges()},
            {"paper-paper", num_cite_edges()}}}};
}

bool is_reachable(const Hin& h, DocIndex s, DocIndex t, MetaPattern m) {
  if (s == t) throw PreconditionError("reachability is only defined between distinct documents");
  if (s >= h.num_papers() || t >= h.num_papers()) throw LookupError("document index out of range");
  auto same_venue = [&] {
    auto vs = h.venue(s);
    return vs.has_value() && vs == h.venue(t);
  };
  switch (m) {
    case MetaPattern::kCites:
      return std::binary_search(h.cites(s).begin(), h.cites(s).end(), t);
    case MetaPattern::kCitedBy:
      return std::binary_search(h.cites(t).begin(), h.cites(t).end(), s);
    case MetaPattern::kCoAuthor:
      return intersection_size(h.authors(s), h.authors(t), 1) >= 1;
    case MetaPattern::kCoVenue:
      return same_venue();
    case MetaPattern::kCoCiting:
      return intersection_size(h.cites(s), h.cites(t), 1) >= 1;
    case MetaPattern::kCoCited:
      return intersection_size(h.cited_by(s), h.cited_by(t), 1) >= 1;
    case MetaPattern::kTwoCoAuthors:
      return intersection_size(h.authors(s), h.authors(t), 2) >= 2;
    case MetaPattern::kCoAuthorCoVenue:
      return same_venue() && intersection_size(h.authors(s), h.authors(t), 1) >= 1;
    case MetaPattern::kTwoCoCitations:
      return intersection_size(h.cites(s), h.cites(t), 2) >= 2;
    case MetaPattern::kTwoCoCiters:
      return intersection_size(h.cited_by(s), h.cited_by(t), 2) >= 2;
  }
  throw InvariantError("unknown meta-pattern value");
}

bool is_reachable(const Hin& h, const std::string& source, const std::string& target, MetaPattern m) {
  return is_reachable(h, h.index_of(source), h.index_of(target), m);
}

std::vector<DocIndex> neighbors(const Hin& h, DocIndex d, MetaPattern m) {
  if (d >= h.num_papers()) throw LookupError("document index out of range");
  auto by_author = [&](std::uint32_t a) -> const std::vector<DocIndex>& { return h.papers_by_author(a); };
  auto citers = [&](DocIndex p) -> const std::vector<DocIndex>& { return h.cited_by(p); };
  auto cited = [&](DocIndex p) -> const std::vector<DocIndex>& { return h.cites(p); };
  switch (m) {
    case MetaPattern::kCites:
      return h.cites(d);
    case MetaPattern::kCitedBy:
      return h.cited_by(d);
    case MetaPattern::kCoAuthor:
      return count_through(d, h.authors(d), by_author, 1);
    case MetaPattern::kTwoCoAuthors:
      return count_through(d, h.authors(d), by_author, 2);
    case MetaPattern::kCoVenue: {
      auto v = h.venue(d);
      if (!v) return {};
      std::vector<DocIndex> out;
      for (auto p : h.papers_in_venue(*v)) {
        if (p != d) out.push_back(p);
      }
      return out;
    }
    case MetaPattern::kCoAuthorCoVenue: {
      auto v = h.venue(d);
      if (!v) return {};
      auto out = count_through(d, h.authors(d), by_author, 1);
      std::erase_if(out, [&](DocIndex p) { return h.venue(p) != v; });
      return out;
    }
    case MetaPattern::kCoCiting:
      return count_through(d, h.cites(d), citers, 1);
    case MetaPattern::kTwoCoCitations:
      return count_through(d, h.cites(d), citers, 2);
    case MetaPattern::kCoCited:
      return count_through(d, h.cited_by(d), cited, 1);
    case MetaPattern::kTwoCoCiters:
      return count_through(d, h.cited_by(d), cited, 2);
  }
  throw InvariantError("unknown meta-pattern value");
}

std::vector<DocIndex> neighbors(const Hin& h, const std::string& d, MetaPattern m) {
  return neighbors(h, h.index_of(d), m);
}

}  // namespace micol
