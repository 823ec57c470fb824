#include "vtolsim/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace vtolsim {

int CsvTable::columnIndex(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

std::size_t CsvTable::requireColumn(const std::string& name) const {
    const int idx = columnIndex(name);
    if (idx < 0) throw std::runtime_error("log is missing column '" + name + "'");
    return static_cast<std::size_t>(idx);
}

CsvTable readCsv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open log file: " + path);

    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("log file is empty: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);

    int lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(table.header.size());
        const char* p = line.c_str();
        while (true) {
            char* end = nullptr;
            row.push_back(std::strtod(p, &end));
            if (end == p)
                throw std::runtime_error(path + ":" + std::to_string(lineNo) +
                                         ": malformed numeric cell");
            p = end;
            if (*p == ',') {
                ++p;
                continue;
            }
            if (*p == '\0') break;
            throw std::runtime_error(path + ":" + std::to_string(lineNo) +
                                     ": unexpected character in row");
        }
        if (row.size() != table.header.size())
            throw std::runtime_error(path + ":" + std::to_string(lineNo) +
                                     ": row width does not match header");
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace vtolsim
