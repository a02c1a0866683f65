#include "ghcb/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "ghcb/error.hpp"

namespace ghcb {

namespace {

ComplexMatrix projector(const ComplexMatrix& w) {
  const ComplexMatrix q = orthonormalize_columns(w);
  return matmul(q, hermitian(q));
}

// ‖P1 − P2‖_F / √2 equals √(m − ‖Q1ᴴQ2‖²) but does not cancel near zero distance.
double projector_distance(const ComplexMatrix& p1, const ComplexMatrix& p2) {
  return std::sqrt(frobenius_norm_sq(p1 - p2) / 2.0);
}

}  // namespace

double chordal_distance(const ComplexMatrix& w1, const ComplexMatrix& w2) {
  if (w1.rows() != w2.rows() || w1.cols() != w2.cols()) {
    throw DimensionError("chordal_distance: shape mismatch " + w1.shape_string() + " vs " +
                         w2.shape_string());
  }
  return projector_distance(projector(w1), projector(w2));
}

McdReport min_chordal_distance(const Codebook& cb) {
  const std::size_t l = cb.size();
  if (l < 2) throw ConfigError("MCD needs at least two codebook entries");
  std::vector<ComplexMatrix> projectors;
  projectors.reserve(l);
  for (const auto& w : cb.matrices) projectors.push_back(projector(w));

  McdReport report;
  report.value = std::numeric_limits<double>::infinity();
  report.first_matrix_value = std::numeric_limits<double>::infinity();
  report.pairwise.reserve(l * (l - 1) / 2);
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = i + 1; j < l; ++j) {
      const double d = projector_distance(projectors[i], projectors[j]);
      report.pairwise.push_back({i + 1, j + 1, d});
      if (d < report.value) {
        report.value = d;
        report.argmin_pair = {i + 1, j + 1};
      }
      if (i == 0) report.first_matrix_value = std::min(report.first_matrix_value, d);
    }
  }
  return report;
}

DistortionProfile codeword_distortion(const ComplexMatrix& x) {
  if (x.rows() % 2 != 0 || x.cols() != 2 || x.rows() == 0) {
    throw DimensionError("codeword_distortion expects (2k)x2, got " + x.shape_string());
  }
  DistortionProfile p;
  for (std::size_t k = 0; k < x.rows(); k += 2) {
    const double d0 = std::abs(x(k, 0));
    const double d1 = std::abs(x(k + 1, 1));
    p.diag_magnitudes.push_back(d0);
    p.diag_magnitudes.push_back(d1);
    p.anti_diag_magnitudes.push_back(std::abs(x(k, 1)));
    p.anti_diag_magnitudes.push_back(std::abs(x(k + 1, 0)));
    p.block_geometric_means.push_back(std::sqrt(d0 * d1));
  }
  p.is_distortion_free =
      *std::max_element(p.diag_magnitudes.begin(), p.diag_magnitudes.end()) <= kDistortionTol;
  return p;
}

MdReport min_determinant(const Codebook& cb, int b) {
  if (b != 4 && b != 6) throw ConfigError("min_determinant supports b in {4, 6}, got " + std::to_string(b));
  if (cb.spec.m != 2) throw ConfigError("min_determinant needs m = 2 (Alamouti)");
  // Differences of odd-integer levels: even integers in [−2(K−1), 2(K−1)].
  const int levels = 1 << (b / 2);
  std::vector<Complex> diffs;
  for (int re = -(levels - 1); re <= levels - 1; ++re)
    for (int im = -(levels - 1); im <= levels - 1; ++im) diffs.emplace_back(2.0 * re, 2.0 * im);

  MdReport report;
  report.b = b;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < cb.size(); ++p) {
    const ComplexMatrix& w = cb.matrices[p];
    for (const Complex& d1 : diffs) {
      for (const Complex& d2 : diffs) {
        if (d1 == Complex(0.0) && d2 == Complex(0.0)) continue;
        const ComplexMatrix xi = precode(w, alamouti_encode(d1, d2));
        const double root = std::sqrt(std::max(0.0, gram_determinant(xi)));
        if (root < best) {
          best = root;
          report.argmin = {p + 1, d1, d2};
        }
      }
    }
  }
  report.min_gram_root = best;
  report.delta_inf = best / std::pow(2.0, report.b_ref);
  report.reported = std::sqrt(std::pow(2.0, b) * report.delta_inf);
  return report;
}

namespace {

double vector_norm_sq(const ComplexMatrix& h) {
  if (h.rows() != 1 && h.cols() != 1) {
    throw DimensionError("expected a channel vector, got " + h.shape_string());
  }
  return frobenius_norm_sq(h);
}

}  // namespace

double pep_chernoff(const ComplexMatrix& h, double snr_linear, int q, double theta_sq) {
  if (!(snr_linear >= 0.0)) throw DomainError("SNR must be non-negative");
  return std::exp(-theta_sq * snr_linear * vector_norm_sq(h) / (2.0 * std::pow(2.0, q)));
}

double effective_norm(const ComplexMatrix& h, Complex theta, FeedbackCorrectness feedback) {
  if ((h.rows() != 1 && h.cols() != 1) || h.data().size() < 2) {
    throw DimensionError("effective_norm needs a vector with >= 2 entries, got " +
                         h.shape_string());
  }
  double h_max = 0.0;
  double h_min = std::numeric_limits<double>::infinity();
  for (const Complex& z : h.data()) {
    h_max = std::max(h_max, std::norm(z));
    h_min = std::min(h_min, std::norm(z));
  }
  if (feedback == FeedbackCorrectness::INCORRECT) std::swap(h_max, h_min);
  const double t2 = std::norm(theta);
  return 2.0 * t2 * h_max + (1.0 + t2 - t2 * t2) * h_min;
}

double average_hamming_weight(const QamConstellation& constellation) {
  if (constellation.b() == 0 || constellation.size() < 2) return 0.0;
  double symbol_sum = 0.0;
  for (std::size_t a = 0; a < constellation.size(); ++a)
    for (std::size_t c = 0; c < constellation.size(); ++c)
      symbol_sum += std::popcount(constellation.label(a) ^ constellation.label(c));
  // Σ over all (k, l) pair codewords is 2·N²·symbol_sum; averaging over the N² values of k
  // leaves 2·symbol_sum.
  return 2.0 * symbol_sum / constellation.b();
}

UnionBound ber_union_bound(const QamConstellation& constellation, const ComplexMatrix& h,
                           double snr_linear, int q, double theta_sq) {
  const double pep = pep_chernoff(h, snr_linear, q, theta_sq);
  UnionBound ub;
  ub.raw = average_hamming_weight(constellation) * pep;
  ub.clipped = std::clamp(ub.raw, 0.0, 1.0);
  return ub;
}

nlohmann::json to_json(const McdReport& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : r.pairwise) pairs.push_back({{"i", p.i}, {"j", p.j}, {"d", p.d}});
  return {{"value", r.value},
          {"argmin_pair", {r.argmin_pair.first, r.argmin_pair.second}},
          {"pairwise", pairs},
          {"first_matrix_value", r.first_matrix_value}};
}

nlohmann::json to_json(const MdReport& r) {
  return {{"b", r.b},
          {"delta_inf", r.delta_inf},
          {"reported", r.reported},
          {"argmin",
           {{"precoder", r.argmin.precoder},
            {"delta1", {r.argmin.delta1.real(), r.argmin.delta1.imag()}},
            {"delta2", {r.argmin.delta2.real(), r.argmin.delta2.imag()}}}},
          {"min_gram_root", r.min_gram_root},
          {"b_ref", r.b_ref},
          {"constellation", "odd-integer"}};
}

nlohmann::json to_json(const DistortionProfile& r) {
  return {{"diag_magnitudes", r.diag_magnitudes},
          {"anti_diag_magnitudes", r.anti_diag_magnitudes},
          {"block_geometric_means", r.block_geometric_means},
          {"is_distortion_free", r.is_distortion_free}};
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + fmt(values[i]);
  return out;
}

}  // namespace

std::string to_key_value(const McdReport& r) {
  return "value=" + fmt(r.value) + "\nargmin_pair=" + std::to_string(r.argmin_pair.first) + "," +
         std::to_string(r.argmin_pair.second) + "\nfirst_matrix_value=" +
         fmt(r.first_matrix_value) + "\npairs=" + std::to_string(r.pairwise.size()) + "\n";
}

std::string to_key_value(const MdReport& r) {
  return "b=" + std::to_string(r.b) + "\ndelta_inf=" + fmt(r.delta_inf) + "\nreported=" +
         fmt(r.reported) + "\nargmin_precoder=" + std::to_string(r.argmin.precoder) +
         "\nmin_gram_root=" + fmt(r.min_gram_root) + "\nb_ref=" + std::to_string(r.b_ref) + "\n";
}

std::string to_key_value(const DistortionProfile& r) {
  return "diag_magnitudes=" + join(r.diag_magnitudes) + "\nanti_diag_magnitudes=" +
         join(r.anti_diag_magnitudes) + "\nblock_geometric_means=" +
         join(r.block_geometric_means) +
         "\nis_distortion_free=" + (r.is_distortion_free ? "true" : "false") + "\n";
}

}  // namespace ghcb
