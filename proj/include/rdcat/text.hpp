#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rdcat {

// ASCII-only case folding; multibyte UTF-8 sequences pass through unchanged.
std::string to_lower_ascii(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);
std::vector<std::string> split(std::string_view s, char delimiter);

// Shortest representation that parses back to the identical value.
std::string format_double(double v);
std::string format_float(float v);

// Reads a text file fully; throws Error(IoError).
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace rdcat
