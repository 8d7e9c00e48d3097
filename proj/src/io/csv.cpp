#include "rfv/io/csv.hpp"

#include "rfv/errors.hpp"

namespace rfv {

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

CsvTable::CsvTable(std::string schema_tag, std::vector<std::string> header)
    : schema_tag_(std::move(schema_tag)), header_(std::move(header)) {
    if (header_.empty()) throw ConfigError("csv table needs at least one column");
}

void CsvTable::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size())
        throw ConfigError("csv row width " + std::to_string(cells.size()) +
                          " does not match header width " +
                          std::to_string(header_.size()));
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += csv_escape(cells[i]);
    }
    rows_.push_back(std::move(line));
}

std::string CsvTable::str() const {
    std::string out = "# schema: " + schema_tag_ + "\n";
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(header_[i]);
    }
    out += '\n';
    for (const std::string& row : rows_) {
        out += row;
        out += '\n';
    }
    return out;
}

}  // namespace rfv
