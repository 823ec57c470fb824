#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vtolsim {

/// Parsed CSV log: header names plus row-major numeric data.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Column index by exact name; -1 when absent.
    int columnIndex(const std::string& name) const;
    /// Column index by exact name; throws naming the column when absent.
    std::size_t requireColumn(const std::string& name) const;
};

CsvTable readCsv(const std::string& path);

}  // namespace vtolsim
