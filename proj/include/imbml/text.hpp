#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace imbml {

/// Shortest decimal form that parses back to the same double.
std::string format_shortest(double value);
/// Fixed-point with the given number of decimals.
std::string format_fixed(double value, int decimals);

std::vector<std::string> split_csv_line(std::string_view line);
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// 64-bit FNV-1a, used for config fingerprints in report headers.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace imbml
