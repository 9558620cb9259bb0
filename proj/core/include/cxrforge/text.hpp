#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cxrforge::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;

std::vector<std::string> split(std::string_view s, char delim);
std::string join(const std::vector<std::string> &parts, std::string_view sep);

/// Lowercases, separates ASCII punctuation into its own tokens, splits on
/// whitespace. Shared by the NLG metrics.
std::vector<std::string> tokenize(std::string_view s);

/// Like tokenize but drops punctuation-only tokens.
std::vector<std::string> words(std::string_view s);

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) noexcept;

/// Lowercased file name without directory or extension.
std::string normalized_stem(std::string_view path);

} // namespace cxrforge::text
