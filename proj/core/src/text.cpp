#include "srl/text.hpp"

namespace srl {
namespace {

struct Decoded {
  char32_t cp;
  std::size_t len;
};

// Malformed sequences decode as a single non-space byte so that arbitrary
// input still splits deterministically.
Decoded decode_utf8(std::string_view s, std::size_t i) noexcept {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (i + len > s.size()) return {0xFFFD, 1};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

template <typename Fn>
void for_each_word(std::string_view text, Fn&& fn) {
  std::size_t i = 0;
  std::size_t start = std::string_view::npos;
  while (i < text.size()) {
    const auto [cp, len] = decode_utf8(text, i);
    if (is_unicode_space(cp)) {
      if (start != std::string_view::npos) {
        if (!fn(start, i)) return;
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = i;
    }
    i += len;
  }
  if (start != std::string_view::npos) fn(start, text.size());
}

}  // namespace

bool is_unicode_space(char32_t cp) noexcept {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x20: case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  for_each_word(text, [&](std::size_t, std::size_t) {
    ++n;
    return true;
  });
  return n;
}

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> out;
  for_each_word(text, [&](std::size_t b, std::size_t e) {
    out.push_back(text.substr(b, e - b));
    return true;
  });
  return out;
}

std::string truncate_words(std::string_view text, std::size_t limit) {
  if (word_count(text) <= limit) return std::string(text);
  std::size_t seen = 0;
  std::size_t end = text.size();
  bool cut = false;
  for_each_word(text, [&](std::size_t, std::size_t e) {
    if (++seen == limit) {
      end = e;
      cut = true;
      return false;
    }
    return true;
  });
  if (limit == 0) return {};
  return std::string(cut ? text.substr(0, end) : text);
}

std::string_view trim(std::string_view text) noexcept {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = text.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = text.find_last_not_of(ws);
  return text.substr(b, e - b + 1);
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace srl
