#pragma once

// UTF-8 helpers for word counting and embedding tokenization. Covers the
// Latin scripts used by the corpus (ASCII, Latin-1, Latin Extended-A);
// other code points pass through unchanged.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mfeval::text {

// Splits on Unicode whitespace (ASCII space/tab/newlines, NBSP, U+2000..U+200A,
// line/paragraph separators, ideographic space, ...).
std::vector<std::string_view> split_whitespace(std::string_view s);

// True when every code point of the token is punctuation or a symbol.
bool is_punctuation_only(std::string_view token);

// Whitespace tokens minus punctuation-only ones. Hyphenated compounds stay
// a single word.
std::size_t count_words(std::string_view s);

std::string to_lower(std::string_view s);

// Removes punctuation code points, keeps everything else.
std::string strip_punctuation(std::string_view s);

std::string_view trim(std::string_view s);

}  // namespace mfeval::text
