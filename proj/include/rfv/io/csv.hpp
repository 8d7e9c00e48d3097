#pragma once

#include <string>
#include <vector>

namespace rfv {

std::string csv_escape(const std::string& cell);

// Accumulates rows and renders the whole table: a "# schema: <tag>" comment
// line, the header, then data rows. Numbers are rendered by the caller with
// format17g so files round-trip bit-faithfully.
class CsvTable {
  public:
    CsvTable(std::string schema_tag, std::vector<std::string> header);

    void add_row(const std::vector<std::string>& cells);
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;

  private:
    std::string schema_tag_;
    std::vector<std::string> header_;
    std::vector<std::string> rows_;  // pre-rendered lines
};

}  // namespace rfv
