#include "mrtlb/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mrtlb::csv {

std::string format(double value, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant_digits, value);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace

void write_named(const std::string& path,
                 const std::vector<std::pair<std::string, std::string>>& rows) {
  auto out = open_out(path);
  out << "name,value\n";
  for (const auto& [name, value] : rows) out << name << ',' << value << '\n';
}

void write_table(const std::string& path, const std::string& header,
                 const std::vector<std::vector<std::string>>& rows) {
  auto out = open_out(path);
  out << header << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

}  // namespace mrtlb::csv
