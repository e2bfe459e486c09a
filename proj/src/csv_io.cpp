#include "corrtest/csv_io.hpp"

#include "corrtest/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace corrtest {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_number(const std::string& s, double& value) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc() && ptr == last;
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& source) {
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    bool first_row = true;
    std::size_t width = 0;
    std::vector<std::vector<double>> rows;
    CsvTable table;
    while (std::getline(is, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (!parse_number(fields[j], row[j])) {
                numeric = false;
                if (!first_row) {
                    throw DataError(source + ":" + std::to_string(line_no) + ": field " +
                                    std::to_string(j + 1) + " ('" + fields[j] +
                                    "') is not a number");
                }
            }
        }
        if (first_row && !numeric) {
            table.header = fields;
            width = fields.size();
            first_row = false;
            continue;
        }
        if (width == 0) width = fields.size();
        if (fields.size() != width) {
            throw DataError(source + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(width) + " fields, found " +
                            std::to_string(fields.size()));
        }
        first_row = false;
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(source + ": no data rows");
    table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), path);
}

}  // namespace corrtest
