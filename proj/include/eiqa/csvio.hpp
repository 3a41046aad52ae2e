#pragma once

#include <string>
#include <vector>

namespace eiqa::harness {

using CsvRow = std::vector<std::string>;

struct CsvTable {
    CsvRow header;
    std::vector<CsvRow> rows;

    int column(const std::string& name) const; // -1 when absent
    int require_column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvRow& header, const std::vector<CsvRow>& rows);

std::string format_double(double v, int digits = 6);

} // namespace eiqa::harness
