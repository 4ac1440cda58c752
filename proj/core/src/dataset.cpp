#include "shapdag/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "shapdag/error.hpp"

namespace shapdag {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::size_t Dataset::column_index(const std::string& name) const {
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j] == name) return j;
    }
    throw InputError("unknown column: " + name);
}

std::vector<double> Dataset::column(std::size_t j) const {
    std::vector<double> out(rows());
    for (std::size_t i = 0; i < rows(); ++i) out[i] = values[i][j];
    return out;
}

Dataset make_dataset(std::vector<std::string> columns, Matrix values) {
    if (columns.size() < 2) throw InputError("dataset needs at least 2 columns");
    if (values.size() < 2) throw InputError("dataset needs at least 2 rows");
    std::set<std::string> seen;
    for (const auto& c : columns) {
        if (!seen.insert(c).second) throw InputError("duplicate column name: " + c);
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].size() != columns.size()) {
            throw InputError("row " + std::to_string(i + 1) + " has " +
                             std::to_string(values[i].size()) + " cells, expected " +
                             std::to_string(columns.size()));
        }
        for (std::size_t j = 0; j < values[i].size(); ++j) {
            if (!std::isfinite(values[i][j])) {
                throw InputError("non-finite value at row " + std::to_string(i + 1) +
                                 ", column " + columns[j]);
            }
        }
    }
    Dataset d;
    d.columns = std::move(columns);
    d.values = std::move(values);
    return d;
}

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw InputError("empty file: " + path);
    std::vector<std::string> header = split_line(line);
    for (auto& h : header) h = trim(h);

    Matrix values;
    std::size_t body_row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++body_row;
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() != header.size()) {
            throw InputError("ragged row " + std::to_string(body_row) + ": " +
                             std::to_string(fields.size()) + " cells, expected " +
                             std::to_string(header.size()));
        }
        std::vector<double> row(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const std::string cell = trim(fields[j]);
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size() ||
                !std::isfinite(v)) {
                throw InputError("cannot parse cell at row " + std::to_string(body_row) +
                                 ", column " + header[j] + ": '" + cell + "'");
            }
            row[j] = v;
        }
        values.push_back(std::move(row));
    }
    return make_dataset(std::move(header), std::move(values));
}

void save_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    for (std::size_t j = 0; j < d.cols(); ++j) {
        if (j) out << ',';
        out << d.columns[j];
    }
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i < d.rows(); ++i) {
        for (std::size_t j = 0; j < d.cols(); ++j) {
            if (j) out << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", d.values[i][j]);
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw InputError("write failed: " + path);
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

Dataset standardize(const Dataset& d) {
    Dataset out = d;
    out.means.assign(d.cols(), 0.0);
    out.sds.assign(d.cols(), 1.0);
    for (std::size_t j = 0; j < d.cols(); ++j) {
        const std::vector<double> col = d.column(j);
        const double m = mean_of(col);
        const double s = sd_of(col);
        if (s <= 0.0 || !std::isfinite(s)) {
            throw InputError("degenerate (constant) column: " + d.columns[j]);
        }
        out.means[j] = m;
        out.sds[j] = s;
        for (std::size_t i = 0; i < d.rows(); ++i) {
            out.values[i][j] = (d.values[i][j] - m) / s;
        }
    }
    out.standardized = true;
    return out;
}

}  // namespace shapdag
