#include "ghcb/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "ghcb/error.hpp"

namespace ghcb {

namespace {

void require_finite(std::span<const Complex> data) {
  for (const auto& z : data) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw DomainError("matrix entry is not finite");
    }
  }
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_string());
  }
  require_finite(data_);
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionError("ragged matrix literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
  require_finite(data_);
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::column(std::span<const Complex> entries) {
  return ComplexMatrix(entries.size(), 1, std::vector<Complex>(entries.begin(), entries.end()));
}

ComplexMatrix ComplexMatrix::columns(std::span<const std::size_t> indices) const {
  ComplexMatrix out(rows_, indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= cols_) {
      throw DimensionError("column index " + std::to_string(indices[j]) + " out of range for " +
                           shape_string());
    }
    for (std::size_t i = 0; i < rows_; ++i) out(i, j) = (*this)(i, indices[j]);
  }
  return out;
}

ComplexMatrix ComplexMatrix::scaled(Complex factor) const {
  ComplexMatrix out = *this;
  for (auto& z : out.data_) z *= factor;
  return out;
}

std::string ComplexMatrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: cannot multiply " + a.shape_string() + " by " +
                         b.shape_string());
  }
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

ComplexMatrix hermitian(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

ComplexMatrix transpose(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "add");
  ComplexMatrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) += b(i, j);
  return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "subtract");
  ComplexMatrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) -= b(i, j);
  return out;
}

double frobenius_norm_sq(const ComplexMatrix& a) {
  // Summed in ascending order so the result depends only on the multiset of entries.
  std::vector<double> terms;
  terms.reserve(a.data().size());
  for (const auto& z : a.data()) terms.push_back(std::norm(z));
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum;
}

Complex determinant(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("determinant of non-square " + a.shape_string());
  }
  const std::size_t n = a.rows();
  ComplexMatrix lu = a;
  Complex det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(pivot, k))) pivot = i;
    if (lu(pivot, k) == Complex(0.0)) return 0.0;
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(pivot, j));
      det = -det;
    }
    det *= lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex factor = lu(i, k) / lu(k, k);
      for (std::size_t j = k; j < n; ++j) lu(i, j) -= factor * lu(k, j);
    }
  }
  return det;
}

double gram_determinant(const ComplexMatrix& a) {
  if (a.rows() < a.cols()) {
    throw DimensionError("gram_determinant needs rows >= cols, got " + a.shape_string());
  }
  const Complex det = determinant(matmul(hermitian(a), a));
  if (std::abs(det.imag()) > kGramImagTol * std::max(1.0, std::abs(det.real()))) {
    throw NumericalError("Gram determinant has imaginary residue " + std::to_string(det.imag()));
  }
  return det.real();
}

ComplexMatrix orthonormalize_columns(const ComplexMatrix& a) {
  if (a.rows() < a.cols()) {
    throw DimensionError("orthonormalize_columns needs rows >= cols, got " + a.shape_string());
  }
  const std::size_t rows = a.rows();
  ComplexMatrix q = a;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        Complex proj = 0.0;
        for (std::size_t i = 0; i < rows; ++i) proj += std::conj(q(i, k)) * q(i, j);
        for (std::size_t i = 0; i < rows; ++i) q(i, j) -= proj * q(i, k);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < rows; ++i) norm += std::norm(q(i, j));
    norm = std::sqrt(norm);
    if (norm < kRankTol) {
      throw RankDeficientError("column " + std::to_string(j) + " is linearly dependent (norm " +
                               std::to_string(norm) + ")");
    }
    for (std::size_t i = 0; i < rows; ++i) q(i, j) /= norm;
  }
  return q;
}

double bessel_j0(double x) {
  if (!std::isfinite(x) || std::abs(x) > kBesselDomain) {
    throw DomainError("bessel_j0 argument outside [-50, 50]: " + std::to_string(x));
  }
  return std::cyl_bessel_j(0.0, std::abs(x));
}

}  // namespace ghcb
