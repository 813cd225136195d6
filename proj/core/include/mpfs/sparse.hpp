#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mpfs {

/// Compressed sparse row matrix. Column ids are sorted and unique per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx, std::vector<double> values);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return col_idx_.size(); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Position of (i, j) in the value array, or -1 if structurally zero.
  std::int64_t find(int i, int j) const;
  double coeff(int i, int j) const;
  void add(int i, int j, double v);

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;
  std::vector<double> diagonal() const;
  SparseMatrix transpose() const;
  double frobenius_norm() const;
  double max_abs() const;
  /// max |A - A^T| over entries
  double asymmetry() const;

  void scale(double s);
  /// this += s * other; sparsity patterns must be identical.
  void axpy(double s, const SparseMatrix& other);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

/// Accumulates (row, col, value) triplets, duplicates are summed.
class TripletBuilder {
 public:
  TripletBuilder(int rows, int cols) : rows_(rows), cols_(cols) {}
  void add(int i, int j, double v) { entries_.push_back({i, j, v}); }
  void reserve(std::size_t n) { entries_.reserve(n); }
  SparseMatrix build() const;

 private:
  struct Entry {
    int i;
    int j;
    double v;
  };
  int rows_;
  int cols_;
  std::vector<Entry> entries_;
};

/// Sparse product A * B.
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

}  // namespace mpfs
