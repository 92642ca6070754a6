#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace malfam {

/// FNV-1a 64-bit. Stable across platforms and runs; used for cache file
/// names, deterministic per-key RNG seeding, and manifest hashes.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string to_hex(std::uint64_t value);

std::string lowercase_ascii(std::string_view text);
std::string trim(std::string_view text);

/// Collapses every run of whitespace into a single space and trims the ends.
std::string collapse_whitespace(std::string_view text);

std::vector<std::string> split_lines(std::string_view text);

std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and renames over the target, so readers
/// never observe a partially written file.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
/// Avoids std::uniform_real_distribution, whose output is not pinned by the
/// standard; fixture bytes must reproduce exactly.
double unit_double(std::uint64_t raw);

}  // namespace malfam
