#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <string>

#include <json.hpp>

namespace micol {

using json = nlohmann::json;

/// Calls `fn(object, line_number)` for every non-blank line. Lines that are
/// not JSON objects raise ParseError with the 1-based line number.
void for_each_jsonl(std::istream& in, const std::string& source,
                    const std::function<void(const json&, std::size_t)>& fn);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& value);

/// Field accessors that turn type mismatches into ParseError.
std::string require_string(const json& obj, const char* key, const std::string& source,
                           std::size_t line);
std::vector<std::string> optional_string_list(const json& obj, const char* key,
                                              const std::string& source, std::size_t line);

}  // namespace micol
