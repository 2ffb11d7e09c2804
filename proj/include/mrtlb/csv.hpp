#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mrtlb::csv {

/// Decimal rendering with a fixed number of significant digits; identical
/// input yields byte-identical output.
std::string format(double value, int significant_digits = 17);

/// name,value rows (15 significant digits, matching the parameter tables).
void write_named(const std::string& path,
                 const std::vector<std::pair<std::string, std::string>>& rows);

/// Arbitrary table with a header row; cells preformatted.
void write_table(const std::string& path, const std::string& header,
                 const std::vector<std::vector<std::string>>& rows);

}  // namespace mrtlb::csv
