#ifndef RABISIM_CSV_HPP
#define RABISIM_CSV_HPP

#include <span>
#include <string>
#include <vector>

namespace rabi {

// Tabular CSV with a header row and 12-significant-digit values, written
// column-major from equal-length vectors.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};

std::string format_csv(const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);

} // namespace rabi

#endif
