#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ghcb/codebook.hpp"
#include "ghcb/numerics.hpp"
#include "ghcb/stbc.hpp"

namespace ghcb {

/// d(w1, w2) = sqrt(max(0, m − ‖Q1ᴴQ2‖²)) on orthonormalized column bases.
double chordal_distance(const ComplexMatrix& w1, const ComplexMatrix& w2);

struct PairDistance {
  std::size_t i;  // 1-based
  std::size_t j;
  double d;
};

struct McdReport {
  /// Minimum over all unordered pairs.
  double value = 0.0;
  std::pair<std::size_t, std::size_t> argmin_pair{0, 0};
  std::vector<PairDistance> pairwise;
  /// min over i >= 2 of d(W_1, W_i).
  double first_matrix_value = 0.0;
};

McdReport min_chordal_distance(const Codebook& cb);

struct DistortionProfile {
  std::vector<double> diag_magnitudes;
  std::vector<double> anti_diag_magnitudes;
  /// sqrt(|x[2k,0]|·|x[2k+1,1]|) for each stacked 2x2 block k.
  std::vector<double> block_geometric_means;
  bool is_distortion_free = true;
};

inline constexpr double kDistortionTol = 1e-12;

DistortionProfile codeword_distortion(const ComplexMatrix& x);

struct MdArgmin {
  std::size_t precoder = 0;  // 1-based codebook index
  Complex delta1;
  Complex delta2;
};

struct MdReport {
  int b = 0;
  double delta_inf = 0.0;
  double reported = 0.0;
  MdArgmin argmin;
  /// Minimum of sqrt(det(ΞᴴΞ)) over the brute-force search.
  double min_gram_root = 0.0;
  int b_ref = 4;
};

/// Brute force over the odd-integer 2^b-QAM differences for every precoder.
MdReport min_determinant(const Codebook& cb, int b);

/// Literal bound constant for the real golden case.
inline constexpr double kThetaSqLiteral = 1.6180;

/// exp(−theta_sq·snr·‖h‖² / (2·2^q)).
double pep_chernoff(const ComplexMatrix& h, double snr_linear, int q,
                    double theta_sq = kThetaSqLiteral);

enum class FeedbackCorrectness { CORRECT, INCORRECT };

double effective_norm(const ComplexMatrix& h, Complex theta, FeedbackCorrectness feedback);

struct UnionBound {
  double raw = 0.0;
  double clipped = 0.0;
};

/// Average over transmitted Alamouti symbol pairs of Σ_{l≠k} e(S_k,S_l)/b · PEP.
UnionBound ber_union_bound(const QamConstellation& constellation, const ComplexMatrix& h,
                           double snr_linear, int q, double theta_sq = kThetaSqLiteral);

/// (1/N) Σ_k Σ_{l≠k} e(S_k, S_l) / b over all N = |c|² symbol pairs.
double average_hamming_weight(const QamConstellation& constellation);

nlohmann::json to_json(const McdReport& r);
nlohmann::json to_json(const MdReport& r);
nlohmann::json to_json(const DistortionProfile& r);
std::string to_key_value(const McdReport& r);
std::string to_key_value(const MdReport& r);
std::string to_key_value(const DistortionProfile& r);

}  // namespace ghcb
