#include "kickrom/io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kickrom/errors.hpp"

namespace kickrom {

std::string format_double(double v)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific);
    if (res.ec != std::errc()) {
        throw InputError("cannot format number");
    }
    return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& text)
{
    double out = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) {
        ++begin;
    }
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) {
        --end;
    }
    if (begin < end && *begin == '+') {
        ++begin;
    }
    const auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc() || res.ptr != end) {
        throw InputError("not a number: '" + text + "'");
    }
    return out;
}

void write_text_atomic(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw InputError("cannot write " + tmp);
        }
        out << content;
        if (!out) {
            throw InputError("write failed for " + tmp);
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

std::string matrix_to_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& header)
{
    std::string out;
    out.reserve(static_cast<std::size_t>(m.size()) * 25 + 64);
    if (!header.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j) {
            out += header[j];
            out += (j + 1 < header.size()) ? ',' : '\n';
        }
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out += format_double(m(i, j));
            out += (j + 1 < m.cols()) ? ',' : '\n';
        }
    }
    return out;
}

Eigen::MatrixXd matrix_from_csv(const std::string& text, bool hasHeader)
{
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    bool skip = hasHeader;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (skip) {
            skip = false;
            continue;
        }
        std::vector<double> row;
        for (const auto& field : split_csv_line(line)) {
            row.push_back(parse_double(field));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw InputError("ragged CSV matrix");
        }
        rows.push_back(std::move(row));
    }
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = rows[i][j];
        }
    }
    return m;
}

}  // namespace kickrom
