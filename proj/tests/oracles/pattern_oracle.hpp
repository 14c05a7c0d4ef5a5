#pragma once

// Exhaustive meta-pattern instantiation. Each pattern is a small typed graph
// with a source paper s, a target paper t and intermediate nodes; a pair
// (s, t) is reachable when some injective binding of the intermediate nodes
// to network nodes of the right type makes every pattern edge present.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "micol/corpus.hpp"
#include "micol/hin.hpp"

namespace oracle {

enum class NodeType { kPaper, kAuthor, kVenue };

struct PatternEdge {
  // Node slots: 0 = s, 1 = t, 2.. = intermediates.
  int from;
  int to;
  // For paper-paper edges: from cites to. Author/venue edges are undirected
  // paper-attribute links with `from` the paper slot.
};

struct PatternGraph {
  std::vector<NodeType> intermediates;
  std::vector<PatternEdge> edges;
};

inline PatternGraph pattern_graph(micol::MetaPattern m) {
  using micol::MetaPattern;
  using N = NodeType;
  switch (m) {
    case MetaPattern::kCites: return {{}, {{0, 1}}};
    case MetaPattern::kCitedBy: return {{}, {{1, 0}}};
    case MetaPattern::kCoAuthor: return {{N::kAuthor}, {{0, 2}, {1, 2}}};
    case MetaPattern::kCoVenue: return {{N::kVenue}, {{0, 2}, {1, 2}}};
    case MetaPattern::kCoCiting: return {{N::kPaper}, {{0, 2}, {1, 2}}};
    case MetaPattern::kCoCited: return {{N::kPaper}, {{2, 0}, {2, 1}}};
    case MetaPattern::kTwoCoAuthors: return {{N::kAuthor, N::kAuthor}, {{0, 2}, {1, 2}, {0, 3}, {1, 3}}};
    case MetaPattern::kCoAuthorCoVenue: return {{N::kAuthor, N::kVenue}, {{0, 2}, {1, 2}, {0, 3}, {1, 3}}};
    case MetaPattern::kTwoCoCitations: return {{N::kPaper, N::kPaper}, {{0, 2}, {1, 2}, {0, 3}, {1, 3}}};
    case MetaPattern::kTwoCoCiters: return {{N::kPaper, N::kPaper}, {{2, 0}, {2, 1}, {3, 0}, {3, 1}}};
  }
  return {};
}

/// Network built directly from documents, independent of micol::Hin.
class BruteNetwork {
 public:
  explicit BruteNetwork(const std::vector<micol::Document>& docs) {
    std::map<std::string, int> paper_index;
    for (std::size_t i = 0; i < docs.size(); ++i) paper_index[docs[i].id] = static_cast<int>(i);
    std::map<std::string, int> author_index, venue_index;
    n_papers_ = static_cast<int>(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
      for (const auto& a : docs[i].authors) {
        auto [it, added] = author_index.emplace(a, static_cast<int>(author_index.size()));
        writes_.insert({static_cast<int>(i), it->second});
      }
      if (docs[i].venue) {
        auto [it, added] = venue_index.emplace(*docs[i].venue, static_cast<int>(venue_index.size()));
        published_.insert({static_cast<int>(i), it->second});
      }
      for (const auto& r : docs[i].references) {
        auto it = paper_index.find(r);
        if (it != paper_index.end() && it->second != static_cast<int>(i)) cites_.insert({static_cast<int>(i), it->second});
      }
    }
    n_authors_ = static_cast<int>(author_index.size());
    n_venues_ = static_cast<int>(venue_index.size());
  }

  int num_papers() const { return n_papers_; }

  bool reachable(int s, int t, micol::MetaPattern m) const {
    const auto g = pattern_graph(m);
    std::vector<int> binding = {s, t};
    return extend(g, binding);
  }

 private:
  int count(NodeType type) const {
    switch (type) {
      case NodeType::kPaper: return n_papers_;
      case NodeType::kAuthor: return n_authors_;
      case NodeType::kVenue: return n_venues_;
    }
    return 0;
  }

  NodeType slot_type(const PatternGraph& g, int slot) const {
    return slot < 2 ? NodeType::kPaper : g.intermediates[static_cast<std::size_t>(slot - 2)];
  }

  bool edge_present(const PatternGraph& g, const PatternEdge& e, const std::vector<int>& b) const {
    const auto to_type = slot_type(g, e.to);
    const auto from_type = slot_type(g, e.from);
    if (from_type == NodeType::kPaper && to_type == NodeType::kPaper) return cites_.count({b[e.from], b[e.to]}) > 0;
    const int paper = from_type == NodeType::kPaper ? b[e.from] : b[e.to];
    const int other = from_type == NodeType::kPaper ? b[e.to] : b[e.from];
    const auto other_type = from_type == NodeType::kPaper ? to_type : from_type;
    if (other_type == NodeType::kAuthor) return writes_.count({paper, other}) > 0;
    return published_.count({paper, other}) > 0;
  }

  bool extend(const PatternGraph& g, std::vector<int>& b) const {
    const std::size_t slot = b.size();
    if (slot == g.intermediates.size() + 2) {
      for (const auto& e : g.edges) {
        if (!edge_present(g, e, b)) return false;
      }
      return true;
    }
    const auto type = g.intermediates[slot - 2];
    for (int node = 0; node < count(type); ++node) {
      bool used = false;
      for (std::size_t j = 0; j < b.size(); ++j) used = used || (slot_type(g, static_cast<int>(j)) == type && b[j] == node);
      if (used) continue;
      b.push_back(node);
      const bool ok = extend(g, b);
      b.pop_back();
      if (ok) return true;
    }
    return false;
  }

  int n_papers_ = 0, n_authors_ = 0, n_venues_ = 0;
  std::set<std::pair<int, int>> writes_, published_, cites_;
};

}  // namespace oracle
