#include "hostforge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hostforge {

SquareMatrix::SquareMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : n_(rows.size()), data_() {
  data_.reserve(n_ * n_);
  for (const auto& row : rows) {
    if (row.size() != n_) {
      throw std::invalid_argument("SquareMatrix: ragged initializer");
    }
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

SquareMatrix SquareMatrix::identity(std::size_t n) {
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

SquareMatrix SquareMatrix::transposed() const {
  SquareMatrix t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

SquareMatrix SquareMatrix::operator*(const SquareMatrix& rhs) const {
  if (rhs.n_ != n_) throw std::invalid_argument("SquareMatrix: size mismatch");
  SquareMatrix out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < n_; ++k) {
      const double x = (*this)(i, k);
      for (std::size_t j = 0; j < n_; ++j) out(i, j) += x * rhs(k, j);
    }
  return out;
}

double SquareMatrix::max_abs_diff(const SquareMatrix& other) const {
  if (other.n_ != n_) throw std::invalid_argument("SquareMatrix: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i)
    m = std::max(m, std::abs(data_[i] - other.data_[i]));
  return m;
}

namespace {

std::string pivot_message(std::size_t pivot, double value) {
  std::ostringstream os;
  os << "cholesky: matrix not positive definite at pivot " << pivot
     << " (value " << value << ")";
  return os.str();
}

}  // namespace

DecompositionError::DecompositionError(std::size_t pivot, double value)
    : std::runtime_error(pivot_message(pivot, value)), pivot_(pivot) {}

SquareMatrix cholesky(const SquareMatrix& r) {
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(r(i, j) - r(j, i)) > 1e-12)
        throw std::invalid_argument("cholesky: matrix is not symmetric");

  SquareMatrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = r(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw DecompositionError(j, d);
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = r(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

}  // namespace hostforge
