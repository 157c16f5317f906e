#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bcinv/grid.hpp"

namespace bcinv {

// Two-column schemas: potential `x,q`, time series `t,value`. Lines starting
// with '#' are comments. Values are written with 17 significant digits so a
// write/read cycle reproduces them bit for bit.

PotentialSample read_potential_csv(const std::string& path);
Sample read_series_csv(const std::string& path);
ResponseSample read_response_csv(const std::string& path);

void write_series_csv(const std::string& path, const UniformGrid& grid, const std::vector<double>& values,
                      const std::string& x_name = "t", const std::string& y_name = "value",
                      const std::vector<std::string>& comments = {});

inline void write_potential_csv(const std::string& path, const PotentialSample& q,
                                const std::vector<std::string>& comments = {}) {
    write_series_csv(path, q.grid, q.values, "x", "q", comments);
}

/// Dense matrix; first row holds column coordinates, first column row coordinates.
void write_matrix_csv(const std::string& path, const std::vector<double>& row_coords,
                      const std::vector<double>& col_coords, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& comments = {});

/// Shortest text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace bcinv
