#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace groove {

inline constexpr std::string_view kToolkitVersion = "0.3.1";

// Writes `contents` to a sibling temp file and renames it over `path`, so
// readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_text_file(const std::filesystem::path& path);

// 64-bit FNV-1a, printed as 16 lowercase hex digits.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

// "# groove-probe <version> config=<hash> prng=<id>" line placed at the top of
// every CSV and SVG this toolkit emits.
std::string provenance_comment(std::string_view config_hash);

}  // namespace groove
