#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace medtext {

inline constexpr std::size_t kDefaultMaxTokens = 2000;

// Lowercase tokens split on runs of non-alphanumeric characters, truncated to
// the first max_tokens. Empty input yields an empty list.
std::vector<std::string> tokenize(std::string_view text,
                                  std::size_t max_tokens = kDefaultMaxTokens);

// Fixed built-in function-word list. Stopwords are excluded from word
// vertices only; the sequence encoder still sees them.
bool is_stopword(const std::string& token);

std::string join_tokens(const std::vector<std::string>& tokens);

} // namespace medtext
