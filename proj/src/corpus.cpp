#include "micol/corpus.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "micol/error.hpp"
#include "micol/jsonl.hpp"

namespace micol {

std::optional<std::size_t> DocumentSet::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

DocumentSet make_document_set(std::vector<Document> docs, std::size_t self_citations) {
  DocumentSet set;
  set.report.self_citations_dropped = self_citations;
  set.index_.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto& d = docs[i];
    if (d.id.empty()) throw ValidationError("document with empty id at position " + std::to_string(i));
    if (!set.index_.emplace(d.id, i).second) {
      throw ValidationError("duplicate document id \"" + d.id + "\"");
    }
    const auto before = d.references.size();
    std::erase(d.references, d.id);
    set.report.self_citations_dropped += before - d.references.size();
    if (d.labels && !d.labels->empty()) ++set.report.labeled_documents;
  }
  for (const auto& d : docs) {
    for (const auto& r : d.references) {
      if (!set.index_.contains(r)) ++set.report.dangling_references;
    }
  }
  set.report.documents = docs.size();
  set.documents = std::move(docs);
  return set;
}

DocumentSet read_documents(std::istream& in, const std::string& source) {
  std::vector<Document> docs;
  for_each_jsonl(in, source, [&](const json& obj, std::size_t line) {
    Document d;
    d.id = require_string(obj, "paper", source, line);
    d.text = require_string(obj, "text", source, line);
    d.authors = optional_string_list(obj, "author", source, line);
    if (auto it = obj.find("venue"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) throw ParseError(source, line, "field \"venue\" must be a string or null");
      d.venue = it->get<std::string>();
    }
    d.references = optional_string_list(obj, "reference", source, line);
    if (auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
      d.labels = optional_string_list(obj, "label", source, line);
    }
    docs.push_back(std::move(d));
  });
  return make_document_set(std::move(docs));
}

DocumentSet load_documents(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_documents(in, path.string());
}

void write_documents(std::ostream& out, const std::vector<Document>& docs) {
  for (const auto& d : docs) {
    json obj = {{"paper", d.id},
                {"text", d.text},
                {"author", d.authors},
                {"venue", d.venue ? json(*d.venue) : json(nullptr)},
                {"reference", d.references}};
    if (d.labels) obj["label"] = *d.labels;
    out << obj.dump() << '\n';
  }
}

void save_documents(const std::filesystem::path& path, const std::vector<Document>& docs) {
  auto out = open_output(path);
  write_documents(out, docs);
  if (!out) throw IoError("write failed: " + path.string());
}

std::optional<std::size_t> LabelSpace::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LabelSpace make_label_space(std::vector<Label> labels, const TokenizerConfig& cfg) {
  LabelSpace space;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& l = labels[i];
    if (l.id.empty()) throw ValidationError("label with empty id at position " + std::to_string(i));
    if (!space.index_.emplace(l.id, i).second) {
      throw ValidationError("duplicate label id \"" + l.id + "\"");
    }
    if (l.names.empty()) throw ValidationError("label \"" + l.id + "\" has no names");
    for (const auto& n : l.names) {
      if (tokenize(n, cfg).empty()) {
        throw ValidationError("label \"" + l.id + "\" has a name that normalizes to nothing: \"" + n +
                              "\"");
      }
    }
    if (l.primary_name_index >= l.names.size()) {
      throw ValidationError("label \"" + l.id + "\" primary name index out of range");
    }
    if (l.description.empty()) ++space.empty_descriptions;
  }
  space.labels = std::move(labels);
  return space;
}

LabelSpace read_labels(std::istream& in, const std::string& source, const TokenizerConfig& cfg) {
  std::vector<Label> labels;
  for_each_jsonl(in, source, [&](const json& obj, std::size_t line) {
    Label l;
    l.id = require_string(obj, "label", source, line);
    if (!obj.contains("names")) throw ValidationError(source + ":" + std::to_string(line) +
                                                      ": label \"" + l.id + "\" missing \"names\"");
    l.names = optional_string_list(obj, "names", source, line);
    if (auto it = obj.find("description"); it != obj.end() && !it->is_null()) {
      l.description = require_string(obj, "description", source, line);
    }
    if (auto it = obj.find("primary"); it != obj.end()) {
      if (!it->is_number_unsigned()) throw ParseError(source, line, "\"primary\" must be a non-negative integer");
      l.primary_name_index = it->get<std::size_t>();
    }
    labels.push_back(std::move(l));
  });
  return make_label_space(std::move(labels), cfg);
}

LabelSpace load_labels(const std::filesystem::path& path, const TokenizerConfig& cfg) {
  auto in = open_input(path);
  return read_labels(in, path.string(), cfg);
}

void write_labels(std::ostream& out, const std::vector<Label>& labels) {
  for (const auto& l : labels) {
    json obj = {{"label", l.id}, {"names", l.names}, {"description", l.description}};
    if (l.primary_name_index != 0) obj["primary"] = l.primary_name_index;
    out << obj.dump() << '\n';
  }
}

void save_labels(const std::filesystem::path& path, const std::vector<Label>& labels) {
  auto out = open_output(path);
  write_labels(out, labels);
  if (!out) throw IoError("write failed: " + path.string());
}

Tokens label_text(const Label& label, const TokenizerConfig& cfg) {
  Tokens out = tokenize(label.names.at(label.primary_name_index), cfg);
  Tokens desc = tokenize(label.description, cfg);
  out.insert(out.end(), std::make_move_iterator(desc.begin()), std::make_move_iterator(desc.end()));
  return out;
}

}  // namespace micol
