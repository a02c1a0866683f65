#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "ghcb/channel.hpp"
#include "ghcb/codebook.hpp"
#include "ghcb/stbc.hpp"

namespace ghcb {

struct SimConfig {
  CodebookSpec codebook_spec = default_spec(CodebookFamily::GHC_REAL);
  int b = 4;
  std::vector<double> snr_grid_db;
  FeedbackModel feedback = FeedbackModel::perfect();
  std::uint64_t min_trials = 10000;
  std::uint64_t min_bit_errors = 200;
  std::uint64_t max_trials = 10'000'000;
  std::uint64_t seed = 1;
  bool renormalize_precoders = false;

  void validate() const;
};

/// 0, 2, ..., 30 dB.
std::vector<double> default_snr_grid();

struct BerPoint {
  double snr_db = 0.0;
  double ber = 0.0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_simulated = 0;
  std::uint64_t trials = 0;
  /// Trial cap reached before min_bit_errors accumulated.
  bool low_confidence = false;

  /// Binomial standard deviation of the BER estimate.
  double sigma() const;
  friend bool operator==(const BerPoint&, const BerPoint&) = default;
};

struct SweepResult {
  SimConfig config;
  std::vector<BerPoint> points;
  std::string codebook_digest;
  double wallclock = 0.0;
};

struct Selection {
  std::size_t index = 0;  // 1-based
  ComplexMatrix precoder;
};

/// argmax_i ‖h_fbᵀ W_i‖², lowest index on ties.
Selection select_precoder(const ComplexMatrix& h_fb, const Codebook& cb);

/// Codebook the simulator actually transmits with (renormalized when configured).
Codebook simulation_codebook(const SimConfig& cfg);

/// Trials are batched and seeded per (seed, snr, trial) so the result does not
/// depend on `threads`.
BerPoint run_ber_point(const SimConfig& cfg, const Codebook& cb, double snr_db,
                       unsigned threads = 1);

/// Bit errors of one trial computed with the public per-step operations.
/// Reference path for the batched engine; erasures count b errors.
std::uint64_t reference_trial_errors(const SimConfig& cfg, const Codebook& cb, double snr_db,
                                     std::uint64_t trial);

SweepResult run_sweep(const SimConfig& cfg, unsigned threads = 1);

/// SNR gap in dB at target_ber, positive when `a` needs less SNR than `b`.
double array_gain(const SweepResult& a, const SweepResult& b, double target_ber);

/// Mean union-bound raw value over `samples` CN(0, I) channel draws of `n_entries` taps.
double mean_union_bound(const QamConstellation& c, int n_entries, int q, double snr_db,
                        int samples, std::uint64_t seed, double theta_sq);

nlohmann::json to_json(const SimConfig& cfg);
nlohmann::json to_json(const BerPoint& p);
nlohmann::json to_json(const SweepResult& r);
/// Columns snr_db,ber,bit_errors,bits,trials.
std::string to_csv(const SweepResult& r);

}  // namespace ghcb
