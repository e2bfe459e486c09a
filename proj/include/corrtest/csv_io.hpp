#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace corrtest {

struct CsvTable {
    Eigen::MatrixXd values;
    std::vector<std::string> header;  // empty when the file has no header row
};

/// Numeric CSV: comma separated, '.' decimals, optional header detected from a
/// non-numeric first row, blank lines skipped. Throws DataError naming file and line.
CsvTable read_csv(const std::string& path);

CsvTable parse_csv(const std::string& text, const std::string& source = "<input>");

}  // namespace corrtest
