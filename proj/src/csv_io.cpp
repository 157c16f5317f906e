#include "bcinv/csv_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bcinv/errors.hpp"

namespace bcinv {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& text, std::size_t row) {
    if (text.empty()) throw FormatError("missing value", row);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || errno == ERANGE) {
        throw FormatError("cannot parse number '" + text + "'", row);
    }
    if (!std::isfinite(v)) throw FormatError("non-finite value '" + text + "'", row);
    return v;
}

struct TwoColumns {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::size_t> rows;
};

TwoColumns read_two_columns(const std::string& path, const std::string& x_name, const std::string& y_name) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'", 0);
    TwoColumns data;
    std::string line;
    std::size_t row = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++row;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto cells = split(t);
        if (!have_header) {
            if (cells.size() != 2 || cells[0] != x_name || cells[1] != y_name) {
                throw FormatError("expected header '" + x_name + "," + y_name + "'", row);
            }
            have_header = true;
            continue;
        }
        if (cells.size() != 2) throw FormatError("expected 2 columns, found " + std::to_string(cells.size()), row);
        data.x.push_back(parse_number(cells[0], row));
        data.y.push_back(parse_number(cells[1], row));
        data.rows.push_back(row);
    }
    if (!have_header) throw FormatError("missing header '" + x_name + "," + y_name + "'", row);
    if (data.x.size() < 3) throw FormatError("need at least 3 data rows", row);

    if (std::abs(data.x[0]) > 1e-12) throw FormatError("first abscissa must be 0", data.rows[0]);
    const double h = data.x[1] - data.x[0];
    if (!(h > 0.0)) throw FormatError("abscissae must be strictly increasing", data.rows[1]);
    for (std::size_t i = 1; i < data.x.size(); ++i) {
        const double d = data.x[i] - data.x[i - 1];
        if (!(d > 0.0)) throw FormatError("abscissae must be strictly increasing", data.rows[i]);
        if (std::abs(d - h) > 1e-9 * h) throw FormatError("non-uniform spacing", data.rows[i]);
    }
    return data;
}

void write_comments(std::ofstream& out, const std::vector<std::string>& comments) {
    for (const auto& c : comments) out << "# " << c << '\n';
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("grids_io", "cannot write '" + path + "'");
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

PotentialSample read_potential_csv(const std::string& path) {
    auto d = read_two_columns(path, "x", "q");
    return PotentialSample(UniformGrid(d.x.size(), d.x.back()), std::move(d.y));
}

Sample read_series_csv(const std::string& path) {
    auto d = read_two_columns(path, "t", "value");
    return Sample(UniformGrid(d.x.size(), d.x.back()), std::move(d.y));
}

ResponseSample read_response_csv(const std::string& path) {
    auto d = read_two_columns(path, "t", "value");
    return ResponseSample(UniformGrid(d.x.size(), d.x.back()), std::move(d.y));
}

void write_series_csv(const std::string& path, const UniformGrid& grid, const std::vector<double>& values,
                      const std::string& x_name, const std::string& y_name,
                      const std::vector<std::string>& comments) {
    if (values.size() != grid.size()) throw ContractViolation("grids_io", "series length does not match grid");
    auto out = open_for_write(path);
    write_comments(out, comments);
    out << x_name << ',' << y_name << '\n';
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = (i + 1 == values.size()) ? grid.length() : grid.at(i);
        out << format_double(x) << ',' << format_double(values[i]) << '\n';
    }
}

void write_matrix_csv(const std::string& path, const std::vector<double>& row_coords,
                      const std::vector<double>& col_coords, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& comments) {
    if (static_cast<std::size_t>(m.rows()) != row_coords.size() ||
        static_cast<std::size_t>(m.cols()) != col_coords.size()) {
        throw ContractViolation("grids_io", "matrix shape does not match coordinates");
    }
    auto out = open_for_write(path);
    write_comments(out, comments);
    for (double c : col_coords) out << ',' << format_double(c);
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << format_double(row_coords[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_double(m(i, j));
        out << '\n';
    }
}

}  // namespace bcinv
