#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kickrom {

/// Shortest text that parses back to the identical double.
std::string format_double(double v);
double parse_double(const std::string& text);

/// Writes through a temporary file renamed into place.
void write_text_atomic(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

/// Plain numeric CSV: optional header row, then one matrix row per line.
std::string matrix_to_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& header = {});
Eigen::MatrixXd matrix_from_csv(const std::string& text, bool hasHeader);

/// Splits a CSV line on commas (no quoting support; none of our files need it).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace kickrom
