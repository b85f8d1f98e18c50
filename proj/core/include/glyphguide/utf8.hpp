#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace glyphguide {

/// Decodes UTF-8 into scalar values. Returns nullopt on any malformed,
/// overlong, surrogate or out-of-range sequence.
std::optional<std::vector<char32_t>> decode_utf8(std::string_view s);

bool is_valid_utf8(std::string_view s);

/// Scalar values excluding U+0020. Throws ValidationError on invalid UTF-8.
std::size_t count_chars_excluding_spaces(std::string_view s);

}  // namespace glyphguide
