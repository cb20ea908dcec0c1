#include "stinger/tokenize.hpp"

#include <cctype>

namespace stinger {

namespace {

bool is_ascii_space(unsigned char c) { return std::isspace(c) != 0; }

bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

char lower_ascii(unsigned char c) {
  return static_cast<char>(c < 0x80 ? std::tolower(c) : c);
}

}  // namespace

std::vector<SpannedToken> tokenize_with_spans(std::string_view text) {
  std::vector<SpannedToken> out;
  std::string current;
  size_t current_begin = 0;

  auto flush = [&] {
    if (!current.empty()) {
      out.push_back({current, current_begin});
      current.clear();
    }
  };

  for (size_t i = 0; i < text.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_ascii_space(c)) {
      flush();
    } else if (is_ascii_punct(c)) {
      flush();
      out.push_back({std::string(1, static_cast<char>(c)), i});
    } else {
      if (current.empty()) current_begin = i;
      current.push_back(lower_ascii(c));
    }
  }
  flush();
  return out;
}

TokenSeq tokenize(std::string_view text) {
  TokenSeq out;
  for (auto& t : tokenize_with_spans(text)) {
    out.push_back(std::move(t.text));
  }
  return out;
}

}  // namespace stinger
