#include "micol/jsonl.hpp"

#include <istream>

#include "micol/error.hpp"

namespace micol {

void for_each_jsonl(std::istream& in, const std::string& source,
                    const std::function<void(const json&, std::size_t)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(source, line_no, "expected a JSON object");
    fn(obj, line_no);
  }
  if (in.bad()) throw IoError("read failed: " + source);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 1, std::string("malformed JSON: ") + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& value) {
  auto out = open_output(path);
  out << value.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::string require_string(const json& obj, const char* key, const std::string& source,
                           std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(source, line, std::string("missing field \"") + key + "\"");
  if (!it->is_string()) {
    throw ParseError(source, line, std::string("field \"") + key + "\" must be a string");
  }
  return it->get<std::string>();
}

std::vector<std::string> optional_string_list(const json& obj, const char* key,
                                              const std::string& source, std::size_t line) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) {
    throw ParseError(source, line, std::string("field \"") + key + "\" must be a list of strings");
  }
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw ParseError(source, line, std::string("field \"") + key + "\" must be a list of strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace micol
