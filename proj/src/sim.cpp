#include "ghcb/sim.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include "ghcb/error.hpp"
#include "ghcb/metrics.hpp"

// AVX2 has no FMA, so the wide clone rounds exactly like the baseline one.
#if defined(__x86_64__) && defined(__GNUC__) && defined(__linux__)
#define GHCB_WIDE_SIMD __attribute__((target_clones("avx2", "default")))
#else
#define GHCB_WIDE_SIMD
#endif

namespace ghcb {

namespace {

constexpr std::uint64_t kBatchTrials = 1024;

std::uint64_t point_seed(std::uint64_t seed, double snr_db) {
  return derive_seed(seed, std::bit_cast<std::uint64_t>(snr_db));
}

// Same value as std::complex operator* for finite operands, without the libcall.
inline Complex cmul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// g[c] += h·w[c] for every candidate c, split into real and imaginary parts.
GHCB_WIDE_SIMD void accumulate_column(double hr, double hi, const double* __restrict wr,
                       const double* __restrict wi, double* __restrict gr,
                       double* __restrict gi, std::size_t n) {
  for (std::size_t c = 0; c < n; ++c) {
    gr[c] += hr * wr[c] - hi * wi[c];
    gi[c] += hr * wi[c] + hi * wr[c];
  }
}

// True when a == c·b exactly for some c in {1, −1, j, −j}. Such an entry scores bit-identically
// to b and can never win the lowest-index tie-break, so selection may skip it.
bool unit_rotation_of(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Complex c : {Complex(1.0, 0.0), Complex(-1.0, 0.0), Complex(0.0, 1.0), Complex(0.0, -1.0)}) {
    bool same = true;
    for (std::size_t k = 0; same && k < a.data().size(); ++k) same = a.data()[k] == c * b.data()[k];
    if (same) return true;
  }
  return false;
}

// Flattened codebook plus constants for the per-trial loop. Arithmetic below mirrors
// the public operations step for step so both paths agree bit for bit.
struct TrialKernel {
  std::size_t n_t = 0;
  std::size_t l = 0;
  std::vector<Complex> w;  // l blocks of n_t x 2, row-major
  std::vector<std::size_t> candidates;
  // Candidate precoders split by antenna row, column and real/imag part, laid out so
  // the scoring loop runs across candidates: wsoa[(k * 4 + part) * nc + c].
  std::size_t nc = 0;
  std::vector<double> wsoa;
  QamConstellation constellation;
  int b = 0;
  std::uint32_t mask = 0;
  double sigma = 0.0;
  bool delayed = false;
  double alpha = 1.0;
  double spread = 0.0;
  std::uint64_t seed = 0;

  TrialKernel(const SimConfig& cfg, const Codebook& cb, double snr_db)
      : n_t(static_cast<std::size_t>(cb.spec.n_t)),
        l(cb.size()),
        constellation(cfg.b, true),
        b(cfg.b),
        mask((1u << cfg.b) - 1u),
        sigma(std::sqrt(noise_variance(snr_db))),
        delayed(cfg.feedback.mode() == FeedbackMode::DELAYED),
        alpha(cfg.feedback.alpha()),
        spread(std::sqrt(std::max(0.0, 1.0 - alpha * alpha))),
        seed(point_seed(cfg.seed, snr_db)) {
    w.reserve(l * n_t * 2);
    for (const auto& m : cb.matrices) w.insert(w.end(), m.data().begin(), m.data().end());
    for (std::size_t i = 0; i < l; ++i) {
      bool shadowed = false;
      for (std::size_t j : candidates) {
        if (unit_rotation_of(cb.matrices[i], cb.matrices[j])) {
          shadowed = true;
          break;
        }
      }
      if (!shadowed) candidates.push_back(i);
    }
    nc = candidates.size();
    wsoa.assign(n_t * 4 * nc, 0.0);
    for (std::size_t c = 0; c < nc; ++c) {
      const Complex* wi = &w[candidates[c] * n_t * 2];
      for (std::size_t k = 0; k < n_t; ++k) {
        wsoa[(k * 4 + 0) * nc + c] = wi[2 * k].real();
        wsoa[(k * 4 + 1) * nc + c] = wi[2 * k].imag();
        wsoa[(k * 4 + 2) * nc + c] = wi[2 * k + 1].real();
        wsoa[(k * 4 + 3) * nc + c] = wi[2 * k + 1].imag();
      }
    }
  }

  // argmax_i ‖h_fbᵀ W_i‖² over the candidates, accumulating in the same order as
  // matmul followed by frobenius_norm_sq.
  std::size_t select(const Complex* fb, std::vector<double>& scratch) const {
    scratch.assign(4 * nc, 0.0);
    double* g0r = scratch.data();
    double* g0i = g0r + nc;
    double* g1r = g0i + nc;
    double* g1i = g1r + nc;
    for (std::size_t k = 0; k < n_t; ++k) {
      const double hr = fb[k].real();
      const double hi = fb[k].imag();
      const double* w0r = &wsoa[(k * 4 + 0) * nc];
      const double* w0i = &wsoa[(k * 4 + 1) * nc];
      const double* w1r = &wsoa[(k * 4 + 2) * nc];
      const double* w1i = &wsoa[(k * 4 + 3) * nc];
      accumulate_column(hr, hi, w0r, w0i, g0r, g0i, nc);
      accumulate_column(hr, hi, w1r, w1i, g1r, g1i, nc);
    }
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t c = 0; c < nc; ++c) {
      const double score = (g0r[c] * g0r[c] + g0i[c] * g0i[c]) + (g1r[c] * g1r[c] + g1i[c] * g1i[c]);
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    return candidates[best];
  }

  std::uint64_t run(std::uint64_t first, std::uint64_t last, std::vector<Complex>& h,
                    std::vector<Complex>& hf) const {
    std::uint64_t errors = 0;
    std::vector<double> scratch;
    for (std::uint64_t t = first; t < last; ++t) {
      Rng rng(seed, t);
      for (std::size_t k = 0; k < n_t; ++k) h[k] = rng.complex_normal();
      const std::vector<Complex>* fb = &h;
      if (delayed) {
        for (std::size_t k = 0; k < n_t; ++k) hf[k] = alpha * h[k] + spread * rng.complex_normal();
        fb = &hf;
      }
      const std::size_t best = select(fb->data(), scratch);
      const std::uint32_t u = rng.next_u32();
      const std::uint32_t l1 = u & mask;
      const std::uint32_t l2 = (u >> b) & mask;
      const Complex s11 = constellation.point(l1);
      const Complex s21 = constellation.point(l2);
      const Complex st[2][2] = {{s11, -std::conj(s21)}, {s21, std::conj(s11)}};

      const Complex* ws = &w[best * n_t * 2];
      Complex y[2] = {0.0, 0.0};
      Complex g[2] = {0.0, 0.0};
      for (std::size_t k = 0; k < n_t; ++k) {
        for (int c = 0; c < 2; ++c) {
          Complex x = 0.0;
          x += cmul(ws[2 * k], st[0][c]);
          x += cmul(ws[2 * k + 1], st[1][c]);
          y[c] += cmul(h[k], x);
        }
      }
      for (int c = 0; c < 2; ++c) y[c] += sigma * rng.complex_normal();
      for (std::size_t k = 0; k < n_t; ++k) {
        g[0] += cmul(h[k], ws[2 * k]);
        g[1] += cmul(h[k], ws[2 * k + 1]);
      }
      std::uint32_t d1 = 0;
      std::uint32_t d2 = 0;
      if (alamouti_decode_labels(y[0], y[1], g[0], g[1], constellation, d1, d2)) {
        errors += static_cast<std::uint64_t>(std::popcount(d1 ^ l1) + std::popcount(d2 ^ l2));
      } else {
        errors += static_cast<std::uint64_t>(b);
      }
    }
    return errors;
  }
};

std::uint64_t next_boundary(std::uint64_t start, const SimConfig& cfg) {
  std::uint64_t end = (start / kBatchTrials + 1) * kBatchTrials;
  if (cfg.min_trials > start) end = std::min(end, cfg.min_trials);
  return std::min(end, cfg.max_trials);
}

}  // namespace

void SimConfig::validate() const {
  codebook_spec.validate();
  if (codebook_spec.m != 2) throw ConfigError("Alamouti precoding needs m = 2");
  if (b != 2 && b != 4 && b != 6) throw ConfigError("b must be 2, 4 or 6");
  if (snr_grid_db.empty()) throw ConfigError("SNR grid is empty");
  for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
    if (!std::isfinite(snr_grid_db[i])) throw ConfigError("SNR grid entry is not finite");
    if (i > 0 && !(snr_grid_db[i] > snr_grid_db[i - 1])) {
      throw ConfigError("SNR grid must be strictly increasing");
    }
  }
  if (min_trials < 1) throw ConfigError("min_trials must be >= 1");
  if (max_trials < min_trials) throw ConfigError("max_trials must be >= min_trials");
}

std::vector<double> default_snr_grid() {
  std::vector<double> grid;
  for (int s = 0; s <= 30; s += 2) grid.push_back(s);
  return grid;
}

double BerPoint::sigma() const {
  if (bits_simulated == 0) return 0.0;
  return std::sqrt(ber * (1.0 - ber) / static_cast<double>(bits_simulated));
}

Selection select_precoder(const ComplexMatrix& h_fb, const Codebook& cb) {
  if (cb.matrices.empty()) throw ConfigError("cannot select from an empty codebook");
  const ComplexMatrix ht = transpose(h_fb);
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const double score = frobenius_norm_sq(matmul(ht, cb.matrices[i]));
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return {best + 1, cb.matrices[best]};
}

Codebook simulation_codebook(const SimConfig& cfg) {
  Codebook cb = build_codebook(cfg.codebook_spec);
  if (cfg.renormalize_precoders) {
    for (auto& w : cb.matrices) {
      for (std::size_t c = 0; c < w.cols(); ++c) {
        double norm = 0.0;
        for (std::size_t r = 0; r < w.rows(); ++r) norm += std::norm(w(r, c));
        norm = std::sqrt(norm);
        for (std::size_t r = 0; r < w.rows(); ++r) w(r, c) /= norm;
      }
    }
  }
  return cb;
}

std::uint64_t reference_trial_errors(const SimConfig& cfg, const Codebook& cb, double snr_db,
                                     std::uint64_t trial) {
  const QamConstellation c(cfg.b, true);
  Rng rng(point_seed(cfg.seed, snr_db), trial);
  const ComplexMatrix h = sample_channel(rng, cb.spec.n_t);
  const ComplexMatrix h_fb = degrade_feedback(h, cfg.feedback, rng);
  const Selection sel = select_precoder(h_fb, cb);
  const std::uint32_t u = rng.next_u32();
  const std::uint32_t mask = (1u << cfg.b) - 1u;
  const std::uint32_t l1 = u & mask;
  const std::uint32_t l2 = (u >> cfg.b) & mask;
  const ComplexMatrix x = precode(sel.precoder, alamouti_encode(c.point(l1), c.point(l2)));
  const ComplexMatrix y = apply_channel(h, x, snr_db, rng);
  const ComplexMatrix h_eff = matmul(transpose(h), sel.precoder);
  try {
    const DecodeResult d = ml_decode(y, h_eff, c);
    const std::array<Complex, 2> sent{c.point(l1), c.point(l2)};
    const auto sent_bits = demodulate(sent, c);
    std::uint64_t errors = 0;
    for (std::size_t i = 0; i < sent_bits.size(); ++i) errors += sent_bits[i] != d.bits[i];
    return errors;
  } catch (const DecodeError&) {
    return static_cast<std::uint64_t>(cfg.b);
  }
}

BerPoint run_ber_point(const SimConfig& cfg, const Codebook& cb, double snr_db, unsigned threads) {
  cfg.validate();
  if (cb.matrices.empty() || cb.matrices.front().cols() != 2) {
    throw ConfigError("simulation needs a non-empty n_t x 2 codebook");
  }
  const TrialKernel kernel(cfg, cb, snr_db);
  const unsigned workers = std::max(1u, threads);
  const std::size_t wave = static_cast<std::size_t>(workers) * 4;

  BerPoint point;
  point.snr_db = snr_db;
  std::uint64_t start = 0;
  bool done = false;
  while (!done) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
    for (std::uint64_t s = start; ranges.size() < wave && s < cfg.max_trials;) {
      const std::uint64_t e = next_boundary(s, cfg);
      ranges.emplace_back(s, e);
      s = e;
    }
    std::vector<std::uint64_t> errors(ranges.size(), 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      std::vector<Complex> h(kernel.n_t);
      std::vector<Complex> hf(kernel.n_t);
      for (std::size_t i = next++; i < ranges.size(); i = next++) {
        errors[i] = kernel.run(ranges[i].first, ranges[i].second, h, hf);
      }
    };
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 1; t < workers && t < ranges.size(); ++t) pool.emplace_back(worker);
      worker();
    }
    // Sequential scan keeps the stopping point independent of scheduling.
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      point.trials = ranges[i].second;
      point.bit_errors += errors[i];
      const bool enough = point.trials >= cfg.min_trials && point.bit_errors >= cfg.min_bit_errors;
      if (enough || point.trials >= cfg.max_trials) {
        point.low_confidence = !enough;
        done = true;
        break;
      }
    }
    start = point.trials;
  }
  point.bits_simulated = point.trials * 2 * static_cast<std::uint64_t>(cfg.b);
  point.ber = static_cast<double>(point.bit_errors) / static_cast<double>(point.bits_simulated);
  return point;
}

SweepResult run_sweep(const SimConfig& cfg, unsigned threads) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  SweepResult result;
  result.config = cfg;
  const Codebook cb = simulation_codebook(cfg);
  result.codebook_digest = codebook_digest(cb);
  for (double snr : cfg.snr_grid_db) result.points.push_back(run_ber_point(cfg, cb, snr, threads));
  result.wallclock =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

namespace {

double crossing_snr(const SweepResult& r, double target) {
  const auto& p = r.points;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    if (p[k].ber >= target && p[k + 1].ber <= target) {
      if (p[k].ber == target) return p[k].snr_db;
      if (p[k + 1].ber == target) return p[k + 1].snr_db;
      if (p[k + 1].ber <= 0.0) break;
      const double y0 = std::log10(p[k].ber);
      const double y1 = std::log10(p[k + 1].ber);
      const double t = (std::log10(target) - y0) / (y1 - y0);
      return p[k].snr_db + t * (p[k + 1].snr_db - p[k].snr_db);
    }
  }
  throw RangeError("target BER " + std::to_string(target) + " not bracketed by the curve");
}

}  // namespace

double array_gain(const SweepResult& a, const SweepResult& b, double target_ber) {
  if (!(target_ber > 0.0 && target_ber < 1.0)) throw RangeError("target BER must be in (0, 1)");
  if (a.config.snr_grid_db != b.config.snr_grid_db || a.config.b != b.config.b) {
    throw ConfigError("array_gain needs sweeps on the same SNR grid and constellation");
  }
  return crossing_snr(b, target_ber) - crossing_snr(a, target_ber);
}

double mean_union_bound(const QamConstellation& c, int n_entries, int q, double snr_db,
                        int samples, std::uint64_t seed, double theta_sq) {
  if (samples < 1) throw ConfigError("need at least one channel sample");
  const double snr = std::pow(10.0, snr_db / 10.0);
  const double weight = average_hamming_weight(c);
  double sum = 0.0;
  for (int s = 0; s < samples; ++s) {
    Rng rng(seed, static_cast<std::uint64_t>(s));
    const ComplexMatrix h = sample_channel(rng, n_entries);
    sum += weight * pep_chernoff(h, snr, q, theta_sq);
  }
  return sum / samples;
}

nlohmann::json to_json(const SimConfig& cfg) {
  const CodebookSpec& s = cfg.codebook_spec;
  nlohmann::json spec = {{"family", family_name(s.family)},
                         {"n_t", s.n_t},
                         {"m", s.m},
                         {"l", s.l},
                         {"q", s.q()},
                         {"rotation_u", s.rotation_u},
                         {"l_rot", s.l_rot}};
  spec["golden_case_n"] = s.golden_n ? nlohmann::json(*s.golden_n) : nlohmann::json(nullptr);
  return {{"codebook_spec", spec},
          {"b", cfg.b},
          {"snr_grid_db", cfg.snr_grid_db},
          {"feedback",
           {{"mode", cfg.feedback.mode() == FeedbackMode::PERFECT ? "perfect" : "delayed"},
            {"fd_tc", cfg.feedback.fd_tc()},
            {"delta", cfg.feedback.delta()},
            {"alpha", cfg.feedback.alpha()}}},
          {"min_trials", cfg.min_trials},
          {"min_bit_errors", cfg.min_bit_errors},
          {"max_trials", cfg.max_trials},
          {"seed", cfg.seed},
          {"renormalize_precoders", cfg.renormalize_precoders}};
}

nlohmann::json to_json(const BerPoint& p) {
  return {{"snr_db", p.snr_db},
          {"ber", p.ber},
          {"bit_errors", p.bit_errors},
          {"bits_simulated", p.bits_simulated},
          {"trials", p.trials},
          {"low_confidence", p.low_confidence}};
}

nlohmann::json to_json(const SweepResult& r) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : r.points) points.push_back(to_json(p));
  return {{"config", to_json(r.config)},
          {"points", points},
          {"codebook_digest", r.codebook_digest},
          {"wallclock", r.wallclock}};
}

std::string to_csv(const SweepResult& r) {
  std::string out = "snr_db,ber,bit_errors,bits,trials\n";
  char buf[160];
  for (const auto& p : r.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%llu,%llu,%llu\n", p.snr_db, p.ber,
                  static_cast<unsigned long long>(p.bit_errors),
                  static_cast<unsigned long long>(p.bits_simulated),
                  static_cast<unsigned long long>(p.trials));
    out += buf;
  }
  return out;
}

}  // namespace ghcb
