#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace humor::utf8 {

// Decodes UTF-8; invalid sequences decode to U+FFFD.
std::u32string decode(std::string_view text);
void append(std::string& out, char32_t cp);
std::string encode(std::u32string_view text);

// One string per code point.
std::vector<std::string> split_chars(std::string_view text);

std::size_t length(std::string_view text);

char32_t to_lower(char32_t cp);
std::string to_lower(std::string_view text);

bool is_space(char32_t cp);
bool is_letter_or_digit(char32_t cp);
// Characters that extend a word token: letters, digits, apostrophes and '*'.
bool is_word_char(char32_t cp);
bool is_uppercase(char32_t cp);

// True when every code point is neither a letter/digit nor whitespace.
bool is_all_punct(std::string_view token);

}  // namespace humor::utf8
