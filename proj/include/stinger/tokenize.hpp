#ifndef STINGER_TOKENIZE_HPP_
#define STINGER_TOKENIZE_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace stinger {

using TokenSeq = std::vector<std::string>;

struct SpannedToken {
  std::string text;
  size_t begin;  // index of the token's first character in the source text
};

// Corpus-wide tokenizer shared by the suffix archive, the similarity checker
// and the reward mapper. Rules: lowercase ASCII, split on whitespace, each
// ASCII punctuation character becomes its own single-character token. Bytes
// >= 0x80 are treated as word characters so any UTF-8 input tokenizes
// deterministically.
TokenSeq tokenize(std::string_view text);

// Same segmentation, with the source position of each token's first
// character. Positions refer to the original (pre-lowercase) text.
std::vector<SpannedToken> tokenize_with_spans(std::string_view text);

}  // namespace stinger

#endif  // STINGER_TOKENIZE_HPP_
