#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ghcb {

using Complex = std::complex<double>;

/// Dense row-major complex matrix. Entries are always finite.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  /// Zero matrix of the given shape.
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix column(std::span<const Complex> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const Complex> data() const noexcept { return data_; }

  /// Selected columns, in the order given.
  ComplexMatrix columns(std::span<const std::size_t> indices) const;
  ComplexMatrix scaled(Complex factor) const;

  std::string shape_string() const;

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix hermitian(const ComplexMatrix& a);
ComplexMatrix transpose(const ComplexMatrix& a);
ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);

double frobenius_norm_sq(const ComplexMatrix& a);

/// Determinant of a square matrix by partial-pivot LU.
Complex determinant(const ComplexMatrix& a);

/// det(aᴴa) for a tall or square matrix. The Gram matrix is Hermitian positive
/// semidefinite, so an imaginary part above 1e-9 signals numerical trouble.
double gram_determinant(const ComplexMatrix& a);

/// Modified Gram-Schmidt with one re-orthogonalization pass.
/// Throws RankDeficientError when a pivot column norm falls below 1e-12.
ComplexMatrix orthonormalize_columns(const ComplexMatrix& a);

/// Bessel function of the first kind, order zero, for |x| <= 50.
double bessel_j0(double x);

inline constexpr double kOrthonormalityTol = 1e-10;
inline constexpr double kGramImagTol = 1e-9;
inline constexpr double kRankTol = 1e-12;
inline constexpr double kBesselDomain = 50.0;

}  // namespace ghcb
