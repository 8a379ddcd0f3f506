#include "rabisim/csv.hpp"

#include <cstdio>
#include <fstream>

#include "rabisim/errors.hpp"

namespace rabi {

std::string format_csv(const CsvTable& table) {
    if (table.header.size() != table.columns.size())
        throw validation_error("csv: header/column count mismatch");
    const std::size_t rows = table.columns.empty() ? 0 : table.columns.front().size();
    for (const auto& c : table.columns)
        if (c.size() != rows) throw validation_error("csv: ragged columns");

    std::string out;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (j) out += ',';
        out += table.header[j];
    }
    out += '\n';
    char buf[40];
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < table.columns.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.12g", table.columns[j][i]);
            if (j) out += ',';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::string& path, const CsvTable& table) {
    const std::string body = format_csv(table);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw validation_error("csv: cannot open output file " + path);
    f << body;
    if (!f) throw validation_error("csv: write failed for " + path);
}

} // namespace rabi
