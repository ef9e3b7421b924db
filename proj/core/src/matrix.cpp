#include "ernmf/matrix.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace ernmf {

namespace {

void check_finite_dense(const Eigen::MatrixXd& values) {
  if (!values.allFinite())
    throw InputError("matrix has non-finite entries");
}

void check_finite_sparse(const Eigen::SparseMatrix<double>& values) {
  for (int k = 0; k < values.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(values, k); it; ++it)
      if (!std::isfinite(it.value()))
        throw InputError("matrix has non-finite entries");
}

}  // namespace

DataMatrix DataMatrix::dense(Eigen::MatrixXd values) {
  if (values.rows() < 1 || values.cols() < 1)
    throw InputError("matrix must have at least one row and one column");
  check_finite_dense(values);
  DataMatrix m;
  m.is_sparse_ = false;
  m.rows_ = values.rows();
  m.cols_ = values.cols();
  m.dense_ = std::move(values);
  return m;
}

DataMatrix DataMatrix::sparse(Eigen::SparseMatrix<double> values) {
  if (values.rows() < 1 || values.cols() < 1)
    throw InputError("matrix must have at least one row and one column");
  values.makeCompressed();
  check_finite_sparse(values);
  DataMatrix m;
  m.is_sparse_ = true;
  m.rows_ = values.rows();
  m.cols_ = values.cols();
  m.sparse_ = std::move(values);
  return m;
}

Index DataMatrix::nnz() const {
  if (is_sparse_) return sparse_.nonZeros();
  Index count = 0;
  for (Index j = 0; j < cols_; ++j)
    for (Index i = 0; i < rows_; ++i)
      if (dense_(i, j) != 0.0) ++count;
  return count;
}

const Eigen::MatrixXd& DataMatrix::dense_values() const {
  if (is_sparse_)
    throw InputError("dense_values() called on sparse matrix; use to_dense()");
  return dense_;
}

Eigen::MatrixXd DataMatrix::to_dense() const {
  if (is_sparse_) return Eigen::MatrixXd(sparse_);
  return dense_;
}

const Eigen::SparseMatrix<double>& DataMatrix::sparse_values() const {
  if (!is_sparse_)
    throw InputError("sparse_values() called on dense matrix");
  return sparse_;
}

Eigen::VectorXd DataMatrix::col(Index j) const {
  if (j < 0 || j >= cols_) throw InputError("column index out of range");
  if (!is_sparse_) return dense_.col(j);
  return Eigen::VectorXd(sparse_.col(j));
}

Eigen::MatrixXd DataMatrix::gather_cols(const IndexList& idx) const {
  Eigen::MatrixXd out(rows_, static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(k) = col(idx[k]);
  return out;
}

DataMatrix DataMatrix::permute_cols(const std::vector<Index>& perm) const {
  if (static_cast<Index>(perm.size()) != cols_)
    throw InputError("permutation length does not match column count");
  if (!is_sparse_) {
    Eigen::MatrixXd out(rows_, cols_);
    for (Index j = 0; j < cols_; ++j) out.col(perm[j]) = dense_.col(j);
    return DataMatrix::dense(std::move(out));
  }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(sparse_.nonZeros()));
  for (int k = 0; k < sparse_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sparse_, k); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()),
                         static_cast<int>(perm[it.col()]), it.value());
  Eigen::SparseMatrix<double> out(rows_, cols_);
  out.setFromTriplets(trips.begin(), trips.end());
  return DataMatrix::sparse(std::move(out));
}

DataMatrix DataMatrix::scaled(double factor) const {
  if (!std::isfinite(factor)) throw InputError("scale factor must be finite");
  if (!is_sparse_) return DataMatrix::dense(dense_ * factor);
  Eigen::SparseMatrix<double> out = sparse_ * factor;
  return DataMatrix::sparse(std::move(out));
}

double DataMatrix::frobenius_norm() const {
  return is_sparse_ ? sparse_.norm() : dense_.norm();
}

double DataMatrix::min_coeff() const {
  if (!is_sparse_) return dense_.minCoeff();
  double lo = sparse_.nonZeros() == static_cast<Index>(rows_) * cols_
                  ? std::numeric_limits<double>::infinity()
                  : 0.0;
  for (int k = 0; k < sparse_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sparse_, k); it; ++it)
      lo = std::min(lo, it.value());
  return lo;
}

void require_nonnegative(const DataMatrix& M, const std::string& context) {
  if (M.min_coeff() < 0.0)
    throw InputError(context + ": matrix has negative entries");
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

double parse_value(const char* text, const char** end) {
  errno = 0;
  char* stop = nullptr;
  const double v = std::strtod(text, &stop);
  if (stop == text) throw InputError("malformed numeric value in matrix file");
  if (errno == ERANGE && !std::isfinite(v))
    throw InputError("numeric overflow in matrix file");
  if (end) *end = stop;
  return v;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open file for writing: " + path);
  return out;
}

}  // namespace

DataMatrix read_dense_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* cursor = line.c_str();
    for (;;) {
      const char* stop = nullptr;
      row.push_back(parse_value(cursor, &stop));
      cursor = stop;
      while (*cursor == ' ' || *cursor == '\t') ++cursor;
      if (*cursor == ',') {
        ++cursor;
        continue;
      }
      if (*cursor == '\0' || *cursor == '\r') break;
      throw InputError("unexpected character in CSV file: " + path);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError("ragged rows in CSV file: " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("empty CSV file: " + path);
  Eigen::MatrixXd m(static_cast<Index>(rows.size()),
                    static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return DataMatrix::dense(std::move(m));
}

void write_dense_csv(const DataMatrix& M, const std::string& path) {
  std::ofstream out = open_output(path);
  const Eigen::MatrixXd values = M.to_dense();
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j) out << ',';
      out << format_value(values(i, j));
    }
    out << '\n';
  }
  if (!out) throw InputError("write failed: " + path);
}

DataMatrix read_sparse_coord(const std::string& path) {
  std::ifstream in = open_input(path);
  long long d = 0, m = 0, nnz = 0;
  if (!(in >> d >> m >> nnz) || d < 1 || m < 1 || nnz < 0)
    throw InputError("bad sparse header in " + path);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(nnz));
  for (long long k = 0; k < nnz; ++k) {
    long long i = 0, j = 0;
    std::string value_text;
    if (!(in >> i >> j >> value_text))
      throw InputError("truncated sparse file: " + path);
    if (i < 1 || i > d || j < 1 || j > m)
      throw InputError("sparse entry out of range in " + path);
    trips.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1),
                       parse_value(value_text.c_str(), nullptr));
  }
  Eigen::SparseMatrix<double> sm(static_cast<Index>(d), static_cast<Index>(m));
  sm.setFromTriplets(trips.begin(), trips.end());
  return DataMatrix::sparse(std::move(sm));
}

void write_sparse_coord(const DataMatrix& M, const std::string& path) {
  std::ofstream out = open_output(path);
  if (M.is_sparse()) {
    const auto& sm = M.sparse_values();
    out << M.rows() << ' ' << M.cols() << ' ' << sm.nonZeros() << '\n';
    for (int k = 0; k < sm.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sm, k); it; ++it)
        out << (it.row() + 1) << ' ' << (it.col() + 1) << ' '
            << format_value(it.value()) << '\n';
  } else {
    const auto& values = M.dense_values();
    out << M.rows() << ' ' << M.cols() << ' ' << M.nnz() << '\n';
    for (Index j = 0; j < values.cols(); ++j)
      for (Index i = 0; i < values.rows(); ++i)
        if (values(i, j) != 0.0)
          out << (i + 1) << ' ' << (j + 1) << ' ' << format_value(values(i, j))
              << '\n';
  }
  if (!out) throw InputError("write failed: " + path);
}

DataMatrix load_matrix(const std::string& path) {
  {
    std::ifstream in = open_input(path);
    std::string first_line;
    while (std::getline(in, first_line) && first_line.empty()) {
    }
    // A sparse header is exactly three integers; anything else is CSV.
    std::istringstream probe(first_line);
    long long d, m, nnz;
    std::string tail;
    if (probe >> d >> m >> nnz && !(probe >> tail) &&
        first_line.find(',') == std::string::npos &&
        first_line.find('.') == std::string::npos)
      return read_sparse_coord(path);
  }
  return read_dense_csv(path);
}

}  // namespace ernmf
