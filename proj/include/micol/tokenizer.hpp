#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace micol {

using Tokens = std::vector<std::string>;
using TokenSpan = std::span<const std::string>;

struct TokenizerConfig {
  bool lowercase = true;
  /// When set, any run of non-alphanumeric code points separates tokens.
  /// When cleared, only whitespace separates tokens.
  bool strip_punctuation = true;
  /// Minimum token length in code points.
  std::size_t min_token_length = 1;
};

/// Splits UTF-8 text into tokens. Lowercasing covers ASCII, Latin-1, Greek
/// and Cyrillic; every other non-ASCII letter passes through unchanged.
/// Invalid UTF-8 bytes act as separators.
Tokens tokenize(std::string_view text, const TokenizerConfig& cfg = {});

}  // namespace micol
