#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bayaaz::unicode {

// Strict UTF-8 decoding. Throws Error{encoding} naming the byte offset of the
// first malformed sequence.
std::u32string decode(std::string_view utf8);

std::string encode(std::u32string_view text);
std::string encode(char32_t cp);

// Canonical composition (NFC).
std::string nfc(std::string_view utf8);

bool is_latin_letter(char32_t cp);
bool is_whitespace(char32_t cp);
bool is_punctuation(char32_t cp);
bool is_combining_mark(char32_t cp);

std::string trim(std::string_view utf8);

// Splits on runs of whitespace; no empty pieces.
std::vector<std::string> split_words(std::string_view utf8);

// U+XXXX form, used in error messages.
std::string describe(char32_t cp);

}  // namespace bayaaz::unicode
