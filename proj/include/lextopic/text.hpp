#pragma once

// UTF-8 and file helpers shared by every module. Offsets and lengths
// exposed by the toolkit are counted in Unicode scalar values.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lextopic::text {

/// Decodes UTF-8; throws ValidationError on malformed input.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view scalars);

/// Number of Unicode scalar values in a UTF-8 string.
std::size_t scalar_length(std::string_view bytes);

std::u32string to_lower(std::u32string_view scalars);
std::string to_lower(std::string_view bytes);

bool is_alnum(char32_t c);
bool is_space(char32_t c);
bool is_punct(char32_t c);

/// Whitespace-delimited tokens (Unicode whitespace).
std::vector<std::string> split_whitespace(std::string_view bytes);
std::size_t word_count(std::string_view bytes);

std::string_view trim(std::string_view s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace lextopic::text
