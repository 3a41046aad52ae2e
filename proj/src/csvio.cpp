#include "eiqa/csvio.hpp"

#include <cstdio>
#include <fstream>

#include "eiqa/errors.hpp"

namespace eiqa::harness {

namespace {

CsvRow parse_line(const std::string& line) {
    CsvRow out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(std::move(field));
    return out;
}

std::string encode_field(const std::string& f) {
    if (f.find_first_of(",\"\n") == std::string::npos) return f;
    std::string out = "\"";
    for (char c : f) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

int CsvTable::require_column(const std::string& name) const {
    const int c = column(name);
    if (c < 0) throw ValidationError("missing CSV column: " + name);
    return c;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV: " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        CsvRow row = parse_line(line);
        if (first) {
            table.header = std::move(row);
            first = false;
        } else {
            table.rows.push_back(std::move(row));
        }
    }
    if (first) throw ValidationError("empty CSV: " + path);
    return table;
}

void write_csv(const std::string& path, const CsvRow& header,
               const std::vector<CsvRow>& rows) {
    std::ofstream out(path, std::ios::binary); // '\n' endings for byte-stable output
    if (!out) throw IoError("cannot open CSV for writing: " + path);
    const auto emit = [&](const CsvRow& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << encode_field(row[i]);
        }
        out << '\n';
    };
    emit(header);
    for (const CsvRow& row : rows) emit(row);
    if (!out) throw IoError("error writing CSV: " + path);
}

std::string format_double(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

} // namespace eiqa::harness
