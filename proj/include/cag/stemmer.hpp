#pragma once

#include <string>
#include <string_view>

namespace cag::refmetrics {

// Porter (1980) suffix-stripping stemmer for lowercase ASCII words.
// Words of length <= 2 and words containing non-letters are returned as-is.
std::string porter_stem(std::string_view word);

}  // namespace cag::refmetrics
