#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "ghcb/numerics.hpp"

namespace ghcb {

/// Philox4x32-10 counter-based generator. The 64-bit seed is the key, the 64-bit
/// stream index fills the upper half of the counter and the draw index the lower half,
/// so (seed, stream) names an independent, platform-stable sequence.
class Rng {
 public:
  using result_type = std::uint32_t;

  Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept : seed_(seed), stream_(stream) {}

  static constexpr const char* algorithm() { return "philox4x32-10"; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffu; }
  result_type operator()() { return next_u32(); }

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform();
  /// Standard normal, Marsaglia polar method.
  double normal();
  /// Circularly-symmetric CN(0, 1).
  Complex complex_normal();

  /// One raw Philox block, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> counter,
                                             std::array<std::uint32_t, 2> key);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  static constexpr int kBlocksPerRefill = 4;
  void refill();

  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4 * kBlocksPerRefill> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Mixes two words into a child seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

enum class FeedbackMode { PERFECT, DELAYED };

/// Delayed-feedback correlation model. alpha is derived from (fd_tc, delta) at
/// construction and the object is immutable afterwards.
class FeedbackModel {
 public:
  static FeedbackModel perfect() { return FeedbackModel(); }
  static FeedbackModel delayed(double fd_tc, double delta);

  FeedbackMode mode() const noexcept { return mode_; }
  double fd_tc() const noexcept { return fd_tc_; }
  double delta() const noexcept { return delta_; }
  double alpha() const noexcept { return alpha_; }

  friend bool operator==(const FeedbackModel&, const FeedbackModel&) = default;

 private:
  FeedbackModel() = default;
  FeedbackMode mode_ = FeedbackMode::PERFECT;
  double fd_tc_ = 0.0;
  double delta_ = 0.0;
  double alpha_ = 1.0;
};

/// n_t x 1 vector of i.i.d. CN(0, 1).
ComplexMatrix sample_channel(Rng& rng, int n_t);

/// y = hᵀx + z, z ~ CN(0, 10^(−snr_db/10)).
ComplexMatrix apply_channel(const ComplexMatrix& h, const ComplexMatrix& x, double snr_db, Rng& rng);

/// alpha·h + sqrt(1 − alpha²)·e with e a fresh CN(0, I) draw; identity for PERFECT.
ComplexMatrix degrade_feedback(const ComplexMatrix& h, const FeedbackModel& fm, Rng& rng);

inline double noise_variance(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

}  // namespace ghcb
