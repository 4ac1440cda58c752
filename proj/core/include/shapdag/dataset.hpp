#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "shapdag/linalg.hpp"

namespace shapdag {

/// Column-named matrix of continuous observations. Immutable after
/// construction; the transforming operations below return new datasets.
struct Dataset {
    std::vector<std::string> columns;
    Matrix values;  // row-major, rows() x cols()
    bool standardized = false;
    std::vector<double> means;  // recorded by standardize()
    std::vector<double> sds;

    std::size_t rows() const { return values.size(); }
    std::size_t cols() const { return columns.size(); }

    /// Index of a named column; throws InputError when absent.
    std::size_t column_index(const std::string& name) const;
    std::vector<double> column(std::size_t j) const;
};

/// Validates invariants (finite entries, m >= 2, p >= 2, unique names) and
/// assembles a dataset.
Dataset make_dataset(std::vector<std::string> columns, Matrix values);

/// Reads a CSV file: mandatory header row, comma separator, '.' decimal
/// point. Errors identify the offending row and column.
Dataset load_csv(const std::string& path);

/// Writes CSV with round-trip (shortest exact) number formatting.
void save_csv(const Dataset& d, const std::string& path);

/// Transforms every column to zero mean and unit sample standard deviation,
/// recording the per-column statistics. Constant columns are rejected.
Dataset standardize(const Dataset& d);

double mean_of(const std::vector<double>& v);
/// Sample standard deviation (n-1 denominator).
double sd_of(const std::vector<double>& v);

}  // namespace shapdag
