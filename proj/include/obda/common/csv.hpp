#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace obda::csv {

struct Record {
  int line = 0;
  std::vector<std::string> fields;
};

/// Comma-separated records; double-quoted fields may contain commas and "" escapes.
/// Blank lines and lines starting with '#' are skipped.
std::vector<Record> parse(std::istream& in, const std::string& source);
std::vector<Record> read_file(const std::filesystem::path& path);

std::string escape(const std::string& field);

}  // namespace obda::csv
