#pragma once

#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ernmf/types.hpp"

namespace ernmf {

// Column-oriented data matrix, dense or sparse.  Entries are validated finite
// at construction; immutable afterwards and safe to share across threads.
class DataMatrix {
 public:
  DataMatrix() = default;

  static DataMatrix dense(Eigen::MatrixXd values);
  static DataMatrix sparse(Eigen::SparseMatrix<double> values);

  bool is_sparse() const { return is_sparse_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const;

  // Dense view.  For sparse storage this materializes a copy.
  const Eigen::MatrixXd& dense_values() const;
  Eigen::MatrixXd to_dense() const;
  const Eigen::SparseMatrix<double>& sparse_values() const;

  Eigen::VectorXd col(Index j) const;
  // Gathers the given columns into a dense d x |idx| matrix.
  Eigen::MatrixXd gather_cols(const IndexList& idx) const;
  DataMatrix permute_cols(const std::vector<Index>& perm) const;
  DataMatrix scaled(double factor) const;

  double frobenius_norm() const;
  double min_coeff() const;

 private:
  bool is_sparse_ = false;
  Index rows_ = 0;
  Index cols_ = 0;
  Eigen::MatrixXd dense_;
  Eigen::SparseMatrix<double> sparse_;
};

// Throws InputError when any entry is negative; used on inputs whose
// semantics are only defined for nonnegative data (corpus counts, the
// document-word matrix handed to clustering).
void require_nonnegative(const DataMatrix& M, const std::string& context);

// Dense CSV: one row per line, comma separated, 17 significant digits.
DataMatrix read_dense_csv(const std::string& path);
void write_dense_csv(const DataMatrix& M, const std::string& path);

// Sparse coordinate text: header "d m nnz", then "row col value" with 1-based
// indices and 17-significant-digit values.
DataMatrix read_sparse_coord(const std::string& path);
void write_sparse_coord(const DataMatrix& M, const std::string& path);

// Reads either format, sniffing the header line.
DataMatrix load_matrix(const std::string& path);

// Shortest text rendering of a double that round-trips exactly.
std::string format_value(double v);

}  // namespace ernmf
