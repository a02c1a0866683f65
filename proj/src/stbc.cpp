#include "ghcb/stbc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "ghcb/error.hpp"

namespace ghcb {

namespace {

std::uint32_t gray(std::uint32_t v) { return v ^ (v >> 1); }

}  // namespace

QamConstellation::QamConstellation(int b, bool normalized)
    : b_(b), normalized_(normalized), lattice_(true) {
  if (b != 2 && b != 4 && b != 6) {
    throw ConfigError("QAM needs b in {2, 4, 6}, got " + std::to_string(b));
  }
  const int half = b / 2;
  levels_ = 1 << half;
  // Mean energy of the odd-integer square lattice is 2(K² − 1)/3.
  const double energy = 2.0 * (levels_ * levels_ - 1) / 3.0;
  scale_ = normalized ? 1.0 / std::sqrt(energy) : 1.0;
  gray_of_level_.resize(static_cast<std::size_t>(levels_));
  points_.resize(static_cast<std::size_t>(levels_) * static_cast<std::size_t>(levels_));
  for (int i = 0; i < levels_; ++i) {
    gray_of_level_[static_cast<std::size_t>(i)] = gray(static_cast<std::uint32_t>(i));
  }
  for (int i = 0; i < levels_; ++i) {
    for (int q = 0; q < levels_; ++q) {
      const std::uint32_t label = (gray_of_level_[static_cast<std::size_t>(i)] << half) |
                                  gray_of_level_[static_cast<std::size_t>(q)];
      points_[label] = scale_ * Complex(2 * i - (levels_ - 1), 2 * q - (levels_ - 1));
    }
  }
}

QamConstellation::QamConstellation(int b, std::vector<Complex> points, bool normalized)
    : b_(b), normalized_(normalized), points_(std::move(points)) {
  if (b < 0 || b > 16 || points_.size() != (std::size_t{1} << b)) {
    throw ConfigError("constellation needs exactly 2^b points");
  }
}

std::uint32_t QamConstellation::slice(Complex z) const {
  if (lattice_) {
    auto level = [&](double v) {
      const double idx = std::round((v / scale_ + (levels_ - 1)) / 2.0);
      const int clamped = static_cast<int>(std::clamp(idx, 0.0, static_cast<double>(levels_ - 1)));
      return gray_of_level_[static_cast<std::size_t>(clamped)];
    };
    return (level(z.real()) << (b_ / 2)) | level(z.imag());
  }
  std::uint32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < points_.size(); ++k) {
    const double d = std::norm(z - points_[k]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::uint32_t>(k);
    }
  }
  return best;
}

QamConstellation make_constellation(int b, bool normalized) { return {b, normalized}; }

std::vector<Complex> modulate(std::span<const std::uint8_t> bits, const QamConstellation& c) {
  const auto b = static_cast<std::size_t>(c.b());
  if (b == 0 || bits.size() % b != 0) {
    throw ConfigError("bit count " + std::to_string(bits.size()) + " is not a multiple of b=" +
                      std::to_string(b));
  }
  std::vector<Complex> out;
  out.reserve(bits.size() / b);
  for (std::size_t k = 0; k < bits.size(); k += b) {
    std::uint32_t label = 0;
    for (std::size_t i = 0; i < b; ++i) label = (label << 1) | (bits[k + i] & 1u);
    out.push_back(c.point(label));
  }
  return out;
}

std::vector<std::uint8_t> demodulate(std::span<const Complex> symbols, const QamConstellation& c) {
  const int b = c.b();
  std::vector<std::uint8_t> out;
  out.reserve(symbols.size() * static_cast<std::size_t>(b));
  for (const Complex& z : symbols) {
    const std::uint32_t label = c.slice(z);
    for (int i = b - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((label >> i) & 1u));
  }
  return out;
}

AlamoutiBlock alamouti_encode(Complex s11, Complex s21) {
  return {s11, s21, ComplexMatrix{{s11, -std::conj(s21)}, {s21, std::conj(s11)}}};
}

ComplexMatrix precode(const ComplexMatrix& w, const AlamoutiBlock& s) {
  if (w.cols() != 2) {
    throw DimensionError("precoder must have 2 columns for Alamouti, got " + w.shape_string());
  }
  return matmul(w, s.matrix);
}

bool alamouti_decode_labels(Complex y1, Complex y2, Complex g1, Complex g2,
                            const QamConstellation& c, std::uint32_t& label1,
                            std::uint32_t& label2) {
  const double gain = std::norm(g1) + std::norm(g2);
  if (gain == 0.0) return false;
  // Textbook products; std::complex operator* would add an inf/nan recovery libcall.
  const auto mul = [](Complex a, Complex b) {
    return Complex(a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real());
  };
  const Complex z1 = mul(std::conj(g1), y1) + mul(g2, std::conj(y2));
  const Complex z2 = mul(std::conj(g2), y1) - mul(g1, std::conj(y2));
  label1 = c.slice(z1 / gain);
  label2 = c.slice(z2 / gain);
  return true;
}

DecodeResult ml_decode(const ComplexMatrix& y, const ComplexMatrix& h_eff,
                       const QamConstellation& c) {
  if (y.rows() != 1 || y.cols() != 2 || h_eff.rows() != 1 || h_eff.cols() != 2) {
    throw DimensionError("ml_decode expects 1x2 inputs, got y " + y.shape_string() + " and h_eff " +
                         h_eff.shape_string());
  }
  std::uint32_t l1 = 0;
  std::uint32_t l2 = 0;
  if (!alamouti_decode_labels(y(0, 0), y(0, 1), h_eff(0, 0), h_eff(0, 1), c, l1, l2)) {
    throw DecodeError("effective channel is zero");
  }
  DecodeResult out{c.point(l1), c.point(l2), {}};
  const std::array<Complex, 2> symbols{out.s11, out.s21};
  out.bits = demodulate(symbols, c);
  return out;
}

}  // namespace ghcb
