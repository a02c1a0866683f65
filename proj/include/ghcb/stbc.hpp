#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ghcb/numerics.hpp"

namespace ghcb {

/// Square Gray-coded QAM. Points are stored in label order, so points[k] carries
/// label k (bits written most-significant first: in-phase half, then quadrature half).
class QamConstellation {
 public:
  /// b in {2, 4, 6}. Unnormalized points sit on the odd-integer lattice.
  QamConstellation(int b, bool normalized);
  /// Arbitrary point set; `points.size()` must equal 2^b. Used for degenerate cases.
  QamConstellation(int b, std::vector<Complex> points, bool normalized);

  int b() const noexcept { return b_; }
  bool normalized() const noexcept { return normalized_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::span<const Complex> points() const noexcept { return points_; }
  std::uint32_t label(std::size_t k) const noexcept { return static_cast<std::uint32_t>(k); }
  const Complex& point(std::uint32_t label) const { return points_[label]; }
  /// Lattice scale: points are scale() times odd integers.
  double scale() const noexcept { return scale_; }

  /// Nearest-point label. Square lattices slice per axis; other point sets search.
  std::uint32_t slice(Complex z) const;

 private:
  int b_ = 0;
  bool normalized_ = false;
  bool lattice_ = false;
  int levels_ = 0;
  double scale_ = 1.0;
  std::vector<Complex> points_;
  std::vector<std::uint32_t> gray_of_level_;
};

QamConstellation make_constellation(int b, bool normalized);

/// Bits are 0/1 bytes, most-significant bit of each label first.
std::vector<Complex> modulate(std::span<const std::uint8_t> bits, const QamConstellation& c);
std::vector<std::uint8_t> demodulate(std::span<const Complex> symbols, const QamConstellation& c);

struct AlamoutiBlock {
  Complex s11;
  Complex s21;
  /// [[s11, −conj(s21)], [s21, conj(s11)]]
  ComplexMatrix matrix;
};

AlamoutiBlock alamouti_encode(Complex s11, Complex s21);

/// X = W·S.
ComplexMatrix precode(const ComplexMatrix& w, const AlamoutiBlock& s);

struct DecodeResult {
  Complex s11;
  Complex s21;
  std::vector<std::uint8_t> bits;
};

/// Matched-filter Alamouti combining followed by per-symbol slicing.
/// y and h_eff are 1x2. Throws DecodeError on an all-zero effective channel.
DecodeResult ml_decode(const ComplexMatrix& y, const ComplexMatrix& h_eff,
                       const QamConstellation& c);

/// Label-only decode used by the simulator hot loop; same arithmetic as ml_decode.
/// Returns false on an all-zero effective channel.
bool alamouti_decode_labels(Complex y1, Complex y2, Complex g1, Complex g2,
                            const QamConstellation& c, std::uint32_t& label1,
                            std::uint32_t& label2);

}  // namespace ghcb
