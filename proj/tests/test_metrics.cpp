#include <bit>
#include <cmath>
#include <random>

#include "doctest.h"
#include "ghcb/codebook.hpp"
#include "ghcb/error.hpp"
#include "ghcb/metrics.hpp"
#include "ghcb/stbc.hpp"
#include "test_util.hpp"

using namespace ghcb;
using ghcb::testing::random_matrix;

namespace {

const Complex J{0.0, 1.0};

ComplexMatrix identity_columns(std::initializer_list<std::size_t> cols) {
  const std::vector<std::size_t> idx(cols);
  return ComplexMatrix::identity(4).columns(idx);
}

ComplexMatrix first_two_columns(const ComplexMatrix& w) {
  const std::vector<std::size_t> idx{0, 1};
  return w.columns(idx);
}

}  // namespace

TEST_CASE("chordal_distance examples") {
  const ComplexMatrix e12 = identity_columns({0, 1});
  CHECK(chordal_distance(e12, identity_columns({2, 3})) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(chordal_distance(e12, identity_columns({0, 2})) == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 gen(11);
  const ComplexMatrix w = random_matrix(gen, 4, 2);
  const ComplexMatrix swap{{0, 1}, {1, 0}};
  CHECK(chordal_distance(w, w.scaled(std::polar(1.0, 0.7))) <= 1e-7);
  CHECK(chordal_distance(w, matmul(w, swap)) <= 1e-7);
  CHECK_THROWS_AS(chordal_distance(w, random_matrix(gen, 4, 3)), DimensionError);
  CHECK_THROWS_AS(chordal_distance(ComplexMatrix(4, 2), w), RankDeficientError);
}

TEST_CASE("chordal_distance is a scale-invariant pseudometric") {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> mag(0.1, 10.0);
  std::uniform_real_distribution<double> ang(-3.14, 3.14);
  for (int t = 0; t < 300; ++t) {
    const ComplexMatrix a = random_matrix(gen, 4, 2);
    const ComplexMatrix b = random_matrix(gen, 4, 2);
    const ComplexMatrix c = random_matrix(gen, 4, 2);
    const double ab = chordal_distance(a, b);
    const double bc = chordal_distance(b, c);
    const double ac = chordal_distance(a, c);
    CHECK(ab >= 0.0);
    CHECK(ab <= std::sqrt(2.0) + 1e-12);
    CHECK(std::abs(ab - chordal_distance(b, a)) <= 1e-8);
    CHECK(chordal_distance(a, a) <= 1e-12);
    CHECK(ac <= ab + bc + 1e-8);
    const Complex k = std::polar(mag(gen), ang(gen));
    CHECK(std::abs(chordal_distance(a, b.scaled(k)) - ab) <= 1e-10);
  }
}

TEST_CASE("min_chordal_distance") {
  const McdReport hc = min_chordal_distance(build_codebook(default_spec(CodebookFamily::HC, 4, 2, 6)));
  CHECK(hc.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(hc.pairwise.size() == 15);
  CHECK(hc.argmin_pair == std::pair<std::size_t, std::size_t>{1, 2});

  const McdReport ghc = min_chordal_distance(build_codebook(default_spec(CodebookFamily::GHC_REAL, 4, 2, 6)));
  CHECK(ghc.value == doctest::Approx(1.0).epsilon(1e-9));

  Codebook twins{default_spec(CodebookFamily::HC, 4, 2, 2), {}};
  const ComplexMatrix w = identity_columns({0, 1});
  twins.matrices = {w, w};
  CHECK(min_chordal_distance(twins).value <= 1e-7);

  Codebook single{default_spec(CodebookFamily::HC, 4, 2, 1), {w}};
  CHECK_THROWS_AS(min_chordal_distance(single), ConfigError);

  for (auto f : all_families()) {
    const McdReport r = min_chordal_distance(build_codebook(default_spec(f, 4, 2, 16)));
    CHECK(r.first_matrix_value >= r.value);
    double lowest = 10.0;
    for (const auto& p : r.pairwise) lowest = std::min(lowest, p.d);
    CHECK(r.value == lowest);
    CHECK(r.value >= 0.0);
    CHECK(r.value <= std::sqrt(2.0));
  }
}

TEST_CASE("codeword_distortion") {
  const Complex s = Complex(1.0, 1.0) / std::sqrt(2.0);
  const ComplexMatrix w = first_two_columns(gh_matrix(2, GoldenCase::REAL));
  const DistortionProfile ghc = codeword_distortion(precode(w, alamouti_encode(s, -s)));
  CHECK(ghc.is_distortion_free);
  REQUIRE(ghc.anti_diag_magnitudes.size() == 4);
  for (double v : ghc.anti_diag_magnitudes) CHECK(v == doctest::Approx(1.4472).epsilon(1e-4));
  for (double v : ghc.block_geometric_means) CHECK(v == 0.0);

  const ComplexMatrix dft = first_two_columns(dft_matrix(4));
  const DistortionProfile dftc = codeword_distortion(precode(dft, alamouti_encode(s, -s)));
  CHECK_FALSE(dftc.is_distortion_free);
  CHECK(*std::max_element(dftc.diag_magnitudes.begin(), dftc.diag_magnitudes.end()) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dftc.diag_magnitudes[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

  const DistortionProfile zero = codeword_distortion(ComplexMatrix(4, 2));
  CHECK(zero.is_distortion_free);
  for (double v : zero.anti_diag_magnitudes) CHECK(v == 0.0);

  const DistortionProfile tiny = codeword_distortion(ComplexMatrix{{1e-13, 1}, {1, 0}});
  CHECK(tiny.is_distortion_free);
  CHECK_FALSE(codeword_distortion(ComplexMatrix{{2e-12, 1}, {1, 0}}).is_distortion_free);

  CHECK_THROWS_AS(codeword_distortion(ComplexMatrix(3, 2)), DimensionError);
  CHECK_THROWS_AS(codeword_distortion(ComplexMatrix(4, 3)), DimensionError);
}

TEST_CASE("GH codewords with the pair (s, -s) are distortion-free over 16-QAM") {
  const QamConstellation c(4, true);
  for (auto gc : {GoldenCase::REAL, GoldenCase::COMPLEX}) {
    const Codebook cb = build_codebook(default_spec(gc == GoldenCase::REAL ? CodebookFamily::GHC_REAL
                                                                         : CodebookFamily::GHC_COMPLEX,
                                                    4, 2, 6));
    for (auto s : c.points()) {
      CHECK(codeword_distortion(precode(cb.at(1), alamouti_encode(s, -s))).is_distortion_free);
    }
  }
  const Codebook hc = build_codebook(default_spec(CodebookFamily::HC, 4, 2, 6));
  for (auto s : c.points()) {
    CHECK(codeword_distortion(precode(hc.at(1), alamouti_encode(s, -s))).is_distortion_free);
  }
}

TEST_CASE("min_determinant") {
  const Codebook dftc = build_codebook(default_spec(CodebookFamily::DFTC, 4, 2, 8));
  const MdReport d4 = min_determinant(dftc, 4);
  CHECK(d4.reported == doctest::Approx(2.0).epsilon(0.01));
  CHECK(d4.b_ref == 4);
  CHECK(d4.reported == std::sqrt(std::pow(2.0, 4) * d4.delta_inf));
  CHECK(d4.delta_inf == d4.min_gram_root / 16.0);

  const Codebook ghc = build_codebook(default_spec(CodebookFamily::GHC_REAL, 4, 2, 6));
  const MdReport g4 = min_determinant(ghc, 4);
  const MdReport g6 = min_determinant(ghc, 6);
  CHECK(std::abs(g4.reported - 2.89) <= 0.02);
  CHECK(std::abs(g6.reported - 5.78) <= 0.03);
  CHECK(std::abs(g6.reported / g4.reported - 2.0) <= 1e-9);
  CHECK(g4.argmin.precoder >= 1);
  CHECK(g4.argmin.precoder <= 6);

  CHECK_THROWS_AS(min_determinant(ghc, 2), ConfigError);
  CHECK_THROWS_AS(min_determinant(build_codebook(default_spec(CodebookFamily::HC, 4, 3, 4)), 4),
                  ConfigError);
}

TEST_CASE("pep_chernoff") {
  std::mt19937_64 gen(5);
  const ComplexMatrix h = random_matrix(gen, 2, 1);
  CHECK(pep_chernoff(h, 0.0, 2) == 1.0);
  CHECK(pep_chernoff(ComplexMatrix(2, 1), 100.0, 2) == 1.0);
  const ComplexMatrix h2{{1.0}, {1.0}};
  CHECK(pep_chernoff(h2, 10.0, 2, 1.6180) == doctest::Approx(std::exp(-4.045)).epsilon(1e-12));
  CHECK(pep_chernoff(h2, 10.0, 2, 1.6180) == doctest::Approx(0.0175).epsilon(0.01));
  CHECK_THROWS_AS(pep_chernoff(h, -1.0, 2), DomainError);
}

TEST_CASE("effective_norm") {
  const Complex theta = std::sqrt(1.618);
  const ComplexMatrix h{{1.0}, {2.0}};
  const double correct = effective_norm(h, theta, FeedbackCorrectness::CORRECT);
  CHECK(correct == doctest::Approx(12.944).epsilon(1e-4));
  const double t2 = 1.618;
  CHECK(correct == doctest::Approx(2 * t2 * 4 + (1 + t2 - t2 * t2) * 1).epsilon(1e-12));
  CHECK(effective_norm(h, theta, FeedbackCorrectness::INCORRECT) ==
        doctest::Approx(2 * t2 * 1 + (1 + t2 - t2 * t2) * 4).epsilon(1e-12));

  const ComplexMatrix flat{{Complex(0.0, 1.5)}, {1.5}};
  CHECK(effective_norm(flat, theta, FeedbackCorrectness::CORRECT) ==
        doctest::Approx(effective_norm(flat, theta, FeedbackCorrectness::INCORRECT)).epsilon(1e-14));

  const Complex unit = std::polar(1.0, 0.3);
  CHECK(effective_norm(h, unit, FeedbackCorrectness::CORRECT) == doctest::Approx(2 * 4 + 1).epsilon(1e-12));
  CHECK(effective_norm(h, unit, FeedbackCorrectness::INCORRECT) == doctest::Approx(2 * 1 + 4).epsilon(1e-12));
  CHECK_THROWS_AS(effective_norm(ComplexMatrix{{1.0}}, theta, FeedbackCorrectness::CORRECT), DimensionError);
}

TEST_CASE("average Hamming weight matches a pairwise codeword count") {
  for (int b : {2, 4}) {
    const QamConstellation c(b, true);
    const std::size_t n = c.size();
    // Enumerate every ordered pair of distinct Alamouti symbol pairs directly.
    double total = 0.0;
    for (std::size_t k1 = 0; k1 < n; ++k1)
      for (std::size_t k2 = 0; k2 < n; ++k2)
        for (std::size_t l1 = 0; l1 < n; ++l1)
          for (std::size_t l2 = 0; l2 < n; ++l2) {
            if (k1 == l1 && k2 == l2) continue;
            const int e = std::popcount(static_cast<unsigned>(k1 ^ l1)) +
                          std::popcount(static_cast<unsigned>(k2 ^ l2));
            total += static_cast<double>(e) / b;
          }
    CHECK(average_hamming_weight(c) == doctest::Approx(total / static_cast<double>(n * n)).epsilon(1e-12));
  }
  CHECK(average_hamming_weight(QamConstellation(4, true)) == doctest::Approx(256.0).epsilon(1e-12));
}

TEST_CASE("ber_union_bound") {
  const QamConstellation c(4, true);
  std::mt19937_64 gen(8);
  const ComplexMatrix h = random_matrix(gen, 2, 1);
  const UnionBound at_zero = ber_union_bound(c, h, 0.0, 2);
  CHECK(at_zero.raw == doctest::Approx(average_hamming_weight(c)).epsilon(1e-12));
  CHECK(at_zero.clipped == 1.0);

  const QamConstellation single(0, {Complex(1.0)}, true);
  CHECK(ber_union_bound(single, h, 5.0, 2).raw == 0.0);

  double previous = ber_union_bound(c, h, 0.0, 2).raw;
  for (double db = 1.0; db <= 40.0; db += 1.0) {
    const UnionBound ub = ber_union_bound(c, h, std::pow(10.0, db / 10.0), 2);
    CHECK(ub.raw <= previous);
    CHECK(ub.clipped >= 0.0);
    CHECK(ub.clipped <= 1.0);
    CHECK(ub.clipped <= ub.raw + 1e-300);
    previous = ub.raw;
  }
}

TEST_CASE("report serialization") {
  const Codebook cb = build_codebook(default_spec(CodebookFamily::HC, 4, 2, 6));
  const McdReport mcd = min_chordal_distance(cb);
  const auto j = to_json(mcd);
  CHECK(j.at("value").get<double>() == mcd.value);
  CHECK(j.at("pairwise").size() == 15);
  CHECK(to_key_value(mcd).find("value=") != std::string::npos);

  const MdReport md = min_determinant(cb, 4);
  CHECK(to_json(md).at("b_ref").get<int>() == 4);
  CHECK(to_key_value(md).find("reported=") != std::string::npos);
}
