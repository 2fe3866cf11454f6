#pragma once

#include <map>
#include <string>
#include <vector>

namespace wavetrap {

/// CSV with a single '#'-prefixed JSON metadata line, numbers printed with
/// %.17g so identical runs emit byte-identical files.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, double> meta;
  std::string meta_note;  // free-form text slot in the metadata line

  void add_row(std::initializer_list<double> vals) { rows.emplace_back(vals); }
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

std::string format_double(double v);

}  // namespace wavetrap
