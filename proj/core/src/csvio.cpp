#include "wavetrap/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wavetrap {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("csv: cannot open '" + path + "' for writing");
  out << "# {";
  bool first = true;
  for (const auto& [k, v] : table.meta) {
    if (!first) out << ",";
    out << "\"" << k << "\":" << format_double(v);
    first = false;
  }
  if (!table.meta_note.empty()) {
    if (!first) out << ",";
    out << "\"note\":\"" << table.meta_note << "\"";
  }
  out << "}\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "");
  out << "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw std::runtime_error("csv: row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i)
      out << format_double(row[i]) << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
  if (!out) throw std::runtime_error("csv: write failed for '" + path + "'");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  bool have_header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      // metadata line: parse the flat "key":number pairs
      std::size_t pos = 0;
      while ((pos = line.find('"', pos)) != std::string::npos) {
        const auto end = line.find('"', pos + 1);
        if (end == std::string::npos) break;
        const std::string key = line.substr(pos + 1, end - pos - 1);
        const auto colon = line.find(':', end);
        if (colon == std::string::npos) break;
        std::size_t stop = line.find_first_of(",}", colon);
        if (stop == std::string::npos) stop = line.size();
        const std::string val = line.substr(colon + 1, stop - colon - 1);
        if (key == "note") {
          table.meta_note = val;
        } else {
          try {
            table.meta[key] = std::stod(val);
          } catch (const std::exception&) {
            // non-numeric metadata entry: keep going
          }
        }
        pos = stop;
      }
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    if (!have_header) {
      while (std::getline(row, cell, ',')) table.columns.push_back(cell);
      have_header = true;
      continue;
    }
    std::vector<double> values;
    while (std::getline(row, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        std::ostringstream os;
        os << "csv: bad number '" << cell << "' at line " << lineno << " of " << path;
        throw std::runtime_error(os.str());
      }
    }
    if (values.size() != table.columns.size()) {
      std::ostringstream os;
      os << "csv: row width " << values.size() << " != header width " << table.columns.size()
         << " at line " << lineno << " of " << path;
      throw std::runtime_error(os.str());
    }
    table.rows.push_back(std::move(values));
  }
  if (!have_header) throw std::runtime_error("csv: no header in '" + path + "'");
  return table;
}

}  // namespace wavetrap
