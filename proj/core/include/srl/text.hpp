#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace srl {

// Words are maximal runs of non-whitespace, where whitespace is the Unicode
// White_Space set decoded from UTF-8. Punctuation stays attached to its word.

bool is_unicode_space(char32_t cp) noexcept;

std::size_t word_count(std::string_view text);

std::vector<std::string_view> split_words(std::string_view text);

/// Prefix of `text` ending at the last byte of word number `limit`. Text with
/// at most `limit` words is returned unchanged.
std::string truncate_words(std::string_view text, std::size_t limit);

std::string_view trim(std::string_view text) noexcept;

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace srl
