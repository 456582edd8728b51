#include "sfd/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sfd/errors.hpp"

namespace sfd {

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace {

void write_meta(std::ostream& out, const CsvMeta& meta) {
    for (const auto& [key, value] : meta.entries) out << "# " << key << ": " << value << "\n";
}

void write_header(std::ostream& out, int d) {
    for (int j = 0; j < d; ++j) out << (j ? "," : "") << "x" << (j + 1);
    out << "\n";
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

// Reads a comment-tolerant CSV body; returns data lines with their numbers.
std::vector<std::pair<std::string, int>> data_lines(std::istream& in) {
    std::vector<std::pair<std::string, int>> lines;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        lines.emplace_back(line, lineno);
    }
    return lines;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return in;
}

template <typename Scalar, typename Parse>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> read_matrix(std::istream& in, Parse parse) {
    const auto lines = data_lines(in);
    if (lines.empty()) throw ParseError("empty CSV", 1);
    const auto header = split_fields(lines[0].first);
    const int d = static_cast<int>(header.size());
    const int n = static_cast<int>(lines.size()) - 1;
    if (n < 1) throw ParseError("CSV has a header but no rows", lines[0].second);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(n, d);
    for (int i = 0; i < n; ++i) {
        const auto& [line, lineno] = lines[static_cast<std::size_t>(i) + 1];
        const auto fields = split_fields(line);
        if (static_cast<int>(fields.size()) != d)
            throw ParseError("expected " + std::to_string(d) + " fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        for (int j = 0; j < d; ++j) m(i, j) = parse(fields[static_cast<std::size_t>(j)], lineno);
    }
    return m;
}

double parse_double(const std::string& s, int lineno) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + s + "'", lineno);
    }
}

int parse_int(const std::string& s, int lineno) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("not an integer: '" + s + "'", lineno);
    }
}

}  // namespace

void write_design_csv(std::ostream& out, const Design& design, const CsvMeta& meta) {
    write_meta(out, meta);
    write_header(out, design.d());
    for (int i = 0; i < design.n(); ++i) {
        for (int j = 0; j < design.d(); ++j)
            out << (j ? "," : "") << format_double(design.points(i, j));
        out << "\n";
    }
}

void write_design_csv(const std::string& path, const Design& design, const CsvMeta& meta) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    write_design_csv(out, design, meta);
}

Design read_design_csv(std::istream& in) {
    Design design;
    design.points = read_matrix<double>(in, parse_double);
    return design;
}

Design read_design_csv(const std::string& path) {
    auto in = open_or_throw(path);
    return read_design_csv(in);
}

void write_levels_csv(std::ostream& out, const Eigen::MatrixXi& levels, const CsvMeta& meta) {
    write_meta(out, meta);
    write_header(out, static_cast<int>(levels.cols()));
    for (Eigen::Index i = 0; i < levels.rows(); ++i) {
        for (Eigen::Index j = 0; j < levels.cols(); ++j)
            out << (j ? "," : "") << levels(i, j);
        out << "\n";
    }
}

Eigen::MatrixXi read_levels_csv(std::istream& in) { return read_matrix<int>(in, parse_int); }

Eigen::MatrixXi read_levels_csv(const std::string& path) {
    auto in = open_or_throw(path);
    return read_levels_csv(in);
}

void write_response_csv(std::ostream& out, const Eigen::VectorXd& y, const CsvMeta& meta) {
    write_meta(out, meta);
    out << "y\n";
    for (Eigen::Index i = 0; i < y.size(); ++i) out << format_double(y(i)) << "\n";
}

Eigen::VectorXd read_response_csv(std::istream& in) {
    const Eigen::MatrixXd m = read_matrix<double>(in, parse_double);
    if (m.cols() != 1) throw ParseError("response CSV must have a single column", 1);
    return m.col(0);
}

Eigen::VectorXd read_response_csv(const std::string& path) {
    auto in = open_or_throw(path);
    return read_response_csv(in);
}

}  // namespace sfd
