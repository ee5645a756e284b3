// Minimal helpers for the comma-separated formats used here. Fields never
// contain quotes or embedded commas.

#ifndef HOSTFORGE_CSV_HPP_
#define HOSTFORGE_CSV_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hostforge::csv {

std::string_view trim(std::string_view s) noexcept;

std::vector<std::string_view> split(std::string_view line, char sep = ',');

/// Whole-field parses; throw std::invalid_argument on trailing garbage.
double to_double(std::string_view field);
std::int64_t to_int(std::string_view field);

/// %.15g
std::string format_double(double v);

}  // namespace hostforge::csv

#endif  // HOSTFORGE_CSV_HPP_
