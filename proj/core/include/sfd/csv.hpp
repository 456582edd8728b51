#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sfd/design.hpp"

namespace sfd {

/// Metadata lines written as `# key: value` comments ahead of the CSV header
/// so every artifact records how it was produced. Readers skip them.
struct CsvMeta {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(std::string key, std::string value) {
        entries.emplace_back(std::move(key), std::move(value));
    }
};

// Design CSV: header `x1,...,xd`, one row per run, full-precision floats.
void write_design_csv(std::ostream& out, const Design& design, const CsvMeta& meta = {});
void write_design_csv(const std::string& path, const Design& design, const CsvMeta& meta = {});
Design read_design_csv(std::istream& in);
Design read_design_csv(const std::string& path);

// Latin hypercube level CSV: same shape, integer entries.
void write_levels_csv(std::ostream& out, const Eigen::MatrixXi& levels, const CsvMeta& meta = {});
Eigen::MatrixXi read_levels_csv(std::istream& in);
Eigen::MatrixXi read_levels_csv(const std::string& path);

// Response CSV: header `y`, one value per row.
void write_response_csv(std::ostream& out, const Eigen::VectorXd& y, const CsvMeta& meta = {});
Eigen::VectorXd read_response_csv(std::istream& in);
Eigen::VectorXd read_response_csv(const std::string& path);

/// Full-precision (round-trip exact) decimal rendering of a double.
std::string format_double(double value);

}  // namespace sfd
