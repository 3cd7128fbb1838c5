#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace kdecorrect {

// A validated sample matrix: one row per observation, one named column per
// variable. By convention the last column is the output Y unless another
// column was selected at load time.
struct Dataset {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;        // M x d, finite entries only
  Eigen::Index output_index = 0; // column predicted by the conditional PDF

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index dims() const { return values.cols(); }

  // Indices of all non-output columns, in original order.
  std::vector<Eigen::Index> input_indices() const;
  // values with the output column removed (M x (d-1)).
  Eigen::MatrixXd input_values() const;
  // The output column.
  Eigen::VectorXd output_values() const { return values.col(output_index); }

  // Checks M >= 2, d >= 2, finiteness, strictly positive column variance.
  // Throws DataError on violation.
  void validate() const;
};

// Result of loading a CSV: the dataset plus the row-filtering tally.
struct LoadReport {
  Dataset data;
  std::size_t rows_retained = 0;
  std::size_t rows_dropped = 0;
};

// Eigendecomposition of the unbiased sample covariance. Eigenvalues are
// sorted ascending and each eigenvector's largest-magnitude component is
// made non-negative, so selective bandwidth components have a stable
// meaning across runs.
struct CovarianceDecomposition {
  Eigen::MatrixXd cov;      // d x d, divisor M-1
  Eigen::MatrixXd eigvecs;  // columns are eigenvectors, matching eigvals
  Eigen::VectorXd eigvals;  // ascending, all positive
  Eigen::Index output_index = 0;
};

// Parses a UTF-8, comma-separated file with one header row. Rows with a
// blank cell, a non-numeric or non-finite token, or the wrong field count
// are dropped and counted. output_column empty selects the last column.
LoadReport load_csv(const std::string& path, const std::string& output_column = "");

// Writes a dataset back out with round-trip numeric precision.
void write_csv(const Dataset& data, const std::string& path);

// Splits into (train, validation). The validation set is a uniform
// without-replacement draw of floor((1-fraction)*M) rows from the seeded
// generator; both parts keep the original row order.
std::pair<Dataset, Dataset> split_train_validation(const Dataset& data, double fraction,
                                                   std::uint64_t seed);

// Unbiased covariance + sorted, sign-fixed eigendecomposition.
// Throws NumericError when the covariance is numerically singular
// (condition number above 1e12).
CovarianceDecomposition covariance_decomposition(const Dataset& data);

}  // namespace kdecorrect
