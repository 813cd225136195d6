#include "mpfs/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpfs {

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                           std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values)) {
  if (static_cast<int>(row_ptr_.size()) != rows_ + 1 || col_idx_.size() != values_.size() ||
      static_cast<std::size_t>(row_ptr_.back()) != col_idx_.size())
    throw std::invalid_argument("inconsistent CSR arrays");
  for (int i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] < 0 || col_idx_[k] >= cols_) throw std::invalid_argument("CSR column out of range");
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1]) throw std::invalid_argument("CSR columns not sorted/unique");
    }
}

std::int64_t SparseMatrix::find(int i, int j) const {
  const auto b = col_idx_.begin() + row_ptr_[i];
  const auto e = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(b, e, j);
  if (it == e || *it != j) return -1;
  return it - col_idx_.begin();
}

double SparseMatrix::coeff(int i, int j) const {
  const auto k = find(i, j);
  return k < 0 ? 0.0 : values_[k];
}

void SparseMatrix::add(int i, int j, double v) {
  const auto k = find(i, j);
  if (k < 0) throw std::out_of_range("entry not in sparsity pattern");
  values_[k] += v;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (int i = 0; i < static_cast<int>(d.size()); ++i) d[i] = coeff(i, i);
  return d;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<int> ptr(cols_ + 1, 0);
  for (int c : col_idx_) ++ptr[c + 1];
  for (int j = 0; j < cols_; ++j) ptr[j + 1] += ptr[j];
  std::vector<int> idx(col_idx_.size());
  std::vector<double> val(values_.size());
  std::vector<int> next(ptr.begin(), ptr.end() - 1);
  for (int i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const int pos = next[col_idx_[k]]++;
      idx[pos] = i;
      val[pos] = values_[k];
    }
  return {cols_, rows_, std::move(ptr), std::move(idx), std::move(val)};
}

double SparseMatrix::frobenius_norm() const { return norm2(values_); }

double SparseMatrix::max_abs() const { return norm_inf(values_); }

double SparseMatrix::asymmetry() const {
  double m = 0.0;
  for (int i = 0; i < rows_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      m = std::max(m, std::abs(values_[k] - coeff(col_idx_[k], i)));
  return m;
}

void SparseMatrix::scale(double s) {
  for (double& v : values_) v *= s;
}

void SparseMatrix::axpy(double s, const SparseMatrix& other) {
  if (other.col_idx_ != col_idx_ || other.row_ptr_ != row_ptr_) throw std::invalid_argument("sparsity patterns differ");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * other.values_[k];
}

SparseMatrix TripletBuilder::build() const {
  std::vector<Entry> sorted = entries_;
  std::sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  std::vector<int> ptr(rows_ + 1, 0);
  std::vector<int> idx;
  std::vector<double> val;
  idx.reserve(sorted.size());
  val.reserve(sorted.size());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto& t = sorted[k];
    if (t.i < 0 || t.i >= rows_ || t.j < 0 || t.j >= cols_) throw std::out_of_range("triplet outside matrix");
    if (!idx.empty() && k > 0 && sorted[k - 1].i == t.i && sorted[k - 1].j == t.j) {
      val.back() += t.v;
      continue;
    }
    idx.push_back(t.j);
    val.push_back(t.v);
    ++ptr[t.i + 1];
  }
  for (int i = 0; i < rows_; ++i) ptr[i + 1] += ptr[i];
  return {rows_, cols_, std::move(ptr), std::move(idx), std::move(val)};
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("dimension mismatch in sparse product");
  std::vector<int> ptr(a.rows() + 1, 0);
  std::vector<int> idx;
  std::vector<double> val;
  std::vector<double> acc(b.cols(), 0.0);
  std::vector<int> marker(b.cols(), -1);
  std::vector<int> cols;
  for (int i = 0; i < a.rows(); ++i) {
    cols.clear();
    for (int ka = a.row_ptr()[i]; ka < a.row_ptr()[i + 1]; ++ka) {
      const int j = a.col_idx()[ka];
      const double av = a.values()[ka];
      for (int kb = b.row_ptr()[j]; kb < b.row_ptr()[j + 1]; ++kb) {
        const int c = b.col_idx()[kb];
        if (marker[c] != i) {
          marker[c] = i;
          acc[c] = 0.0;
          cols.push_back(c);
        }
        acc[c] += av * b.values()[kb];
      }
    }
    std::sort(cols.begin(), cols.end());
    for (int c : cols) {
      idx.push_back(c);
      val.push_back(acc[c]);
    }
    ptr[i + 1] = static_cast<int>(idx.size());
  }
  return {a.rows(), b.cols(), std::move(ptr), std::move(idx), std::move(val)};
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace mpfs
