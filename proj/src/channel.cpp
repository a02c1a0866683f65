#include "ghcb/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#if defined(__SSE2__)
#include <emmintrin.h>
#endif

#include "ghcb/error.hpp"

namespace ghcb {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> Rng::philox(std::array<std::uint32_t, 4> ctr,
                                         std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint32_t Rng::next_u32() {
  if (buffered_ == 0) refill();
  return buffer_[buffer_.size() - static_cast<std::size_t>(buffered_--)];
}

#if defined(__SSE2__)

namespace {

// 32x32 -> 64 multiply of all four lanes by m, split into high and low halves.
inline void mulhilo4(__m128i x, __m128i m, __m128i& hi, __m128i& lo) {
  const __m128i even = _mm_shuffle_epi32(_mm_mul_epu32(x, m), _MM_SHUFFLE(3, 1, 2, 0));
  const __m128i odd =
      _mm_shuffle_epi32(_mm_mul_epu32(_mm_srli_epi64(x, 32), m), _MM_SHUFFLE(3, 1, 2, 0));
  lo = _mm_unpacklo_epi32(even, odd);
  hi = _mm_unpackhi_epi32(even, odd);
}

}  // namespace

// Four consecutive counter blocks at once, one block per SIMD lane. Same values as
// four philox() calls.
void Rng::refill() {
  static_assert(kBlocksPerRefill == 4);
  const auto lane = [this](int j, int shift) {
    return static_cast<int>(static_cast<std::uint32_t>((block_ + static_cast<std::uint64_t>(j)) >> shift));
  };
  __m128i c0 = _mm_setr_epi32(lane(0, 0), lane(1, 0), lane(2, 0), lane(3, 0));
  __m128i c1 = _mm_setr_epi32(lane(0, 32), lane(1, 32), lane(2, 32), lane(3, 32));
  __m128i c2 = _mm_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(stream_)));
  __m128i c3 = _mm_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(stream_ >> 32)));
  const __m128i m0 = _mm_set1_epi32(static_cast<int>(kMul0));
  const __m128i m1 = _mm_set1_epi32(static_cast<int>(kMul1));
  std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
  for (int round = 0; round < 10; ++round) {
    __m128i hi0, lo0, hi1, lo1;
    mulhilo4(c0, m0, hi0, lo0);
    mulhilo4(c2, m1, hi1, lo1);
    c0 = _mm_xor_si128(_mm_xor_si128(hi1, c1), _mm_set1_epi32(static_cast<int>(k0)));
    c1 = lo1;
    c2 = _mm_xor_si128(_mm_xor_si128(hi0, c3), _mm_set1_epi32(static_cast<int>(k1)));
    c3 = lo0;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  // Transpose so each block's four words are contiguous.
  const __m128i t0 = _mm_unpacklo_epi32(c0, c1);
  const __m128i t1 = _mm_unpacklo_epi32(c2, c3);
  const __m128i t2 = _mm_unpackhi_epi32(c0, c1);
  const __m128i t3 = _mm_unpackhi_epi32(c2, c3);
  auto* out = reinterpret_cast<__m128i*>(buffer_.data());
  _mm_storeu_si128(out + 0, _mm_unpacklo_epi64(t0, t1));
  _mm_storeu_si128(out + 1, _mm_unpackhi_epi64(t0, t1));
  _mm_storeu_si128(out + 2, _mm_unpacklo_epi64(t2, t3));
  _mm_storeu_si128(out + 3, _mm_unpackhi_epi64(t2, t3));
  block_ += kBlocksPerRefill;
  buffered_ = static_cast<int>(buffer_.size());
}

#else

void Rng::refill() {
  for (int j = 0; j < kBlocksPerRefill; ++j) {
    const std::uint64_t blk = block_ + static_cast<std::uint64_t>(j);
    const auto b = philox({static_cast<std::uint32_t>(blk), static_cast<std::uint32_t>(blk >> 32),
                           static_cast<std::uint32_t>(stream_),
                           static_cast<std::uint32_t>(stream_ >> 32)},
                          {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    std::copy(b.begin(), b.end(), buffer_.begin() + 4 * j);
  }
  block_ += kBlocksPerRefill;
  buffered_ = static_cast<int>(buffer_.size());
}

#endif

std::uint64_t Rng::next_u64() {
  const std::uint64_t hi = next_u32();
  return (hi << 32) | next_u32();
}

double Rng::uniform() {
  // (k + 0.5) / 2^53 keeps both endpoints out.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

// Marsaglia polar method.
double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  // 32-bit abscissae: one Philox block feeds two attempts.
  auto symmetric = [this] { return (static_cast<double>(next_u32()) + 0.5) * 0x1.0p-31 - 1.0; };
  double u, v, r2;
  do {
    u = symmetric();
    v = symmetric();
    r2 = u * u + v * v;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double f = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_normal_ = v * f;
  has_spare_ = true;
  return u * f;
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

FeedbackModel FeedbackModel::delayed(double fd_tc, double delta) {
  if (!(fd_tc >= 0.0) || !(delta >= 0.0)) {
    throw ConfigError("feedback fd_tc and delta must be non-negative");
  }
  FeedbackModel fm;
  fm.mode_ = FeedbackMode::DELAYED;
  fm.fd_tc_ = fd_tc;
  fm.delta_ = delta;
  fm.alpha_ = bessel_j0(2.0 * std::numbers::pi * fd_tc * delta);
  return fm;
}

ComplexMatrix sample_channel(Rng& rng, int n_t) {
  if (n_t < 1) throw ConfigError("sample_channel needs n_t >= 1");
  ComplexMatrix h(static_cast<std::size_t>(n_t), 1);
  for (std::size_t k = 0; k < h.rows(); ++k) h(k, 0) = rng.complex_normal();
  return h;
}

ComplexMatrix apply_channel(const ComplexMatrix& h, const ComplexMatrix& x, double snr_db,
                            Rng& rng) {
  if (h.cols() != 1 || h.rows() != x.rows()) {
    throw DimensionError("apply_channel: h " + h.shape_string() + " incompatible with x " +
                         x.shape_string());
  }
  const double sigma = std::sqrt(noise_variance(snr_db));
  ComplexMatrix y = matmul(transpose(h), x);
  for (std::size_t t = 0; t < y.cols(); ++t) y(0, t) += sigma * rng.complex_normal();
  return y;
}

ComplexMatrix degrade_feedback(const ComplexMatrix& h, const FeedbackModel& fm, Rng& rng) {
  if (fm.mode() == FeedbackMode::PERFECT) return h;
  const double alpha = fm.alpha();
  const double spread = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
  ComplexMatrix out(h.rows(), h.cols());
  for (std::size_t k = 0; k < h.rows(); ++k)
    for (std::size_t c = 0; c < h.cols(); ++c) out(k, c) = alpha * h(k, c) + spread * rng.complex_normal();
  return out;
}

}  // namespace ghcb
