#include "obda/common/csv.hpp"

#include <fstream>
#include <istream>

#include "obda/common/error.hpp"
#include "obda/common/text.hpp"

namespace obda::csv {

std::vector<Record> parse(std::istream& in, const std::string& source) {
  std::vector<Record> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;

    Record rec;
    rec.line = line_no;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      char c = line[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field += '"';
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        rec.fields.emplace_back(text::trim(field));
        field.clear();
      } else {
        field += c;
      }
    }
    if (quoted) throw ParseError(source, line_no, static_cast<int>(line.size()), "unterminated quoted field");
    rec.fields.emplace_back(text::trim(field));
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<Record> read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse(in, path.string());
}

std::string escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace obda::csv
