#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "micol/tokenizer.hpp"

namespace micol {

/// One paper: text (title and abstract in one field) plus metadata.
struct Document {
  std::string id;
  std::string text;
  std::vector<std::string> authors;
  std::optional<std::string> venue;
  std::vector<std::string> references;
  /// Ground truth, only for evaluation and diagnostics. Training refuses
  /// documents that carry labels.
  std::optional<std::vector<std::string>> labels;

  bool operator==(const Document&) const = default;
};

struct LoadReport {
  std::size_t documents = 0;
  std::size_t self_citations_dropped = 0;
  /// References whose target id is not in the corpus. They are kept on the
  /// document but never become network edges.
  std::size_t dangling_references = 0;
  std::size_t labeled_documents = 0;
};

struct DocumentSet {
  std::vector<Document> documents;
  LoadReport report;

  /// Position of `id` in `documents`, or nullopt.
  std::optional<std::size_t> find(const std::string& id) const;

 private:
  friend DocumentSet make_document_set(std::vector<Document> docs, std::size_t self_citations);
  std::unordered_map<std::string, std::size_t> index_;
};

/// Validates ids, drops self-citations and counts dangling references.
/// Throws ValidationError on a duplicate id.
DocumentSet make_document_set(std::vector<Document> docs, std::size_t self_citations = 0);

DocumentSet read_documents(std::istream& in, const std::string& source = "<stream>");
DocumentSet load_documents(const std::filesystem::path& path);
void write_documents(std::ostream& out, const std::vector<Document>& docs);
void save_documents(const std::filesystem::path& path, const std::vector<Document>& docs);

struct Label {
  std::string id;
  std::vector<std::string> names;
  std::string description;
  /// Which name stands in for the label in its retrieval text.
  std::size_t primary_name_index = 0;

  bool operator==(const Label&) const = default;
};

struct LabelSpace {
  std::vector<Label> labels;
  std::size_t empty_descriptions = 0;

  std::size_t size() const noexcept { return labels.size(); }
  std::optional<std::size_t> find(const std::string& id) const;

 private:
  friend LabelSpace make_label_space(std::vector<Label> labels, const TokenizerConfig& cfg);
  std::unordered_map<std::string, std::size_t> index_;
};

/// Throws ValidationError on duplicate ids, empty name lists, names that
/// normalize to nothing, or an out-of-range primary name.
LabelSpace make_label_space(std::vector<Label> labels, const TokenizerConfig& cfg = {});

LabelSpace read_labels(std::istream& in, const std::string& source = "<stream>",
                       const TokenizerConfig& cfg = {});
LabelSpace load_labels(const std::filesystem::path& path, const TokenizerConfig& cfg = {});
void write_labels(std::ostream& out, const std::vector<Label>& labels);
void save_labels(const std::filesystem::path& path, const std::vector<Label>& labels);

/// Primary name followed by the description, tokenized.
Tokens label_text(const Label& label, const TokenizerConfig& cfg = {});

}  // namespace micol
