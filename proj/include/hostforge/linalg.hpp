#ifndef HOSTFORGE_LINALG_HPP_
#define HOSTFORGE_LINALG_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hostforge {

/// Dense row-major square matrix. Small sizes only (3x3 and 6x6 here).
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
  SquareMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SquareMatrix identity(std::size_t n);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * n_ + j];
  }

  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * n_, n_};
  }

  [[nodiscard]] SquareMatrix transposed() const;
  SquareMatrix operator*(const SquareMatrix& rhs) const;

  [[nodiscard]] double max_abs_diff(const SquareMatrix& other) const;

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

class DecompositionError : public std::runtime_error {
 public:
  DecompositionError(std::size_t pivot, double value);
  [[nodiscard]] std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// Lower-triangular L with positive diagonal and L * L^T = r.
/// Throws DecompositionError naming the first nonpositive pivot, and
/// std::invalid_argument if r is not symmetric.
SquareMatrix cholesky(const SquareMatrix& r);

}  // namespace hostforge

#endif  // HOSTFORGE_LINALG_HPP_
