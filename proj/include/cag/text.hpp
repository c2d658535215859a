#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cag::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool is_blank(std::string_view s);

// Whitespace-delimited tokens.
std::vector<std::string> split_whitespace(std::string_view s);
std::size_t word_count(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_ci(std::string_view s, std::string_view prefix);

}  // namespace cag::text
