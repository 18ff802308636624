#include "otrepair/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "otrepair/errors.hpp"
#include "otrepair/simd/kernels.hpp"

namespace otrepair {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) {
    throw ValidationError("matrix: value count does not match shape");
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ValidationError("matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

std::vector<double> Matrix::row_sums() const {
  std::vector<double> out(rows_);
  simd::active().row_sums(data(), rows_, cols_, out.data());
  return out;
}

std::vector<double> Matrix::col_sums() const {
  std::vector<double> out(cols_);
  simd::active().col_sums(data(), rows_, cols_, out.data());
  return out;
}

double Matrix::total() const { return simd::active().sum(data(), data_.size()); }

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw ValidationError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  }
  return m;
}

}  // namespace otrepair
