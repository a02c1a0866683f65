#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ghcb/codebook.hpp"
#include "ghcb/error.hpp"
#include "test_util.hpp"

using namespace ghcb;
using ghcb::testing::max_abs_diff;

namespace {

const Complex J{0.0, 1.0};

ComplexMatrix sign_pattern_4() {
  return ComplexMatrix{{1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -1, -1}, {1, -1, -1, 1}};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ghcb_test_" + name);
}

}  // namespace

TEST_CASE("sylvester_hadamard") {
  CHECK(sylvester_hadamard(0) == ComplexMatrix{{1.0}});
  CHECK(sylvester_hadamard(1) == ComplexMatrix{{1.0, 1.0}, {1.0, -1.0}});
  CHECK(sylvester_hadamard(2) == sign_pattern_4());
  for (int q = 0; q <= 6; ++q) {
    const ComplexMatrix h = sylvester_hadamard(q);
    CHECK(matmul(transpose(h), h) == ComplexMatrix::identity(h.rows()).scaled(std::pow(2.0, q)));
  }
  CHECK_THROWS_AS(sylvester_hadamard(9), ConfigError);
}

TEST_CASE("golden numbers") {
  const Complex real = golden_number(GoldenCase::REAL);
  const Complex cplx = golden_number(GoldenCase::COMPLEX);
  CHECK(real.real() == doctest::Approx(1.6180339887).epsilon(1e-10));
  CHECK(real.imag() == 0.0);
  CHECK(cplx.real() == doctest::Approx(0.8660254).epsilon(1e-7));
  CHECK(cplx.imag() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(real * (1.0 / real) - 1.0) < 1e-15);
  CHECK(std::abs(cplx * (1.0 / cplx) - 1.0) < 1e-15);
  CHECK(std::abs((1.0 / real - real) - (-1.0)) < 1e-15);
  CHECK(std::abs((1.0 / cplx - cplx) - (-J)) < 1e-15);
}

TEST_CASE("gh_scale") {
  CHECK(gh_scale(2, std::sqrt(5.0)) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(gh_scale(2, std::sqrt(3.0)) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(gh_scale(1, std::sqrt(5.0)) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("gh_matrix reproduces the closed forms") {
  const double s5 = std::sqrt(5.0);
  const ComplexMatrix real_expected = sign_pattern_4().scaled((1.0 + s5) / (2.0 * s5));
  CHECK(max_abs_diff(gh_matrix(2, GoldenCase::REAL), real_expected) < 1e-15);

  const double s3 = std::sqrt(3.0);
  const ComplexMatrix pattern{{1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -J, -J}, {1, -1, -J, J}};
  const ComplexMatrix complex_expected = pattern.scaled((J + s3) / (2.0 * s3));
  CHECK(max_abs_diff(gh_matrix(2, GoldenCase::COMPLEX), complex_expected) < 1e-15);

  const Complex theta = golden_number(GoldenCase::REAL);
  CHECK(max_abs_diff(gh_matrix(1, GoldenCase::REAL),
                     sylvester_hadamard(1).scaled(theta / s5)) < 1e-15);
  CHECK_THROWS_AS(gh_matrix(0, GoldenCase::REAL), ConfigError);
}

TEST_CASE("real golden Hadamard columns are orthogonal with a common norm") {
  const double theta = golden_number(GoldenCase::REAL).real();
  for (int q = 1; q <= 4; ++q) {
    const ComplexMatrix w = gh_matrix(q, GoldenCase::REAL);
    const double n = std::pow(2.0, q);
    const double expected = n * theta * theta / gh_scale(q, std::sqrt(5.0));
    const ComplexMatrix gram = matmul(hermitian(w), w);
    CHECK(max_abs_diff(gram, ComplexMatrix::identity(w.rows()).scaled(expected)) <= 1e-10);
  }
}

TEST_CASE("dft_matrix") {
  CHECK(dft_matrix(1) == ComplexMatrix{{1.0}});
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(max_abs_diff(dft_matrix(2), ComplexMatrix{{r, r}, {r, -r}}) < 1e-16);
  CHECK(std::abs(dft_matrix(4)(1, 1) - 0.5 * J) < 1e-16);
  for (int n : {3, 4, 8, 16}) {
    const ComplexMatrix f = dft_matrix(n);
    CHECK(max_abs_diff(matmul(hermitian(f), f), ComplexMatrix::identity(static_cast<std::size_t>(n))) <= 1e-10);
  }
}

TEST_CASE("dft_rotation") {
  CodebookSpec spec = default_spec(CodebookFamily::DFTC, 2, 2, 4);
  spec.rotation_u = {1, 7};
  spec.l_rot = 0;
  const ComplexMatrix theta = dft_rotation(spec);
  CHECK(std::abs(theta(0, 0) - std::polar(1.0, std::numbers::pi / 2)) < 1e-15);
  CHECK(std::abs(theta(1, 1) - std::polar(1.0, 7 * std::numbers::pi / 2)) < 1e-15);
  CHECK(theta(0, 1) == Complex(0.0));

  spec.rotation_u = {0, 0};
  CHECK(dft_rotation(spec) == ComplexMatrix::identity(2));

  const CodebookSpec four = default_spec(CodebookFamily::DFTC, 4, 2, 64);
  ComplexMatrix power = ComplexMatrix::identity(4);
  const ComplexMatrix step = dft_rotation(four);
  for (int k = 0; k < four.rotation_base(); ++k) power = matmul(power, step);
  CHECK(max_abs_diff(power, ComplexMatrix::identity(4)) <= 1e-10);

  CodebookSpec missing = four;
  missing.rotation_u.clear();
  CHECK_THROWS_AS(dft_rotation(missing), ConfigError);
  CHECK_THROWS_AS(dft_rotation(default_spec(CodebookFamily::HC)), ConfigError);
}

TEST_CASE("column_subsets are lexicographic") {
  const auto s = column_subsets(4, 2);
  REQUIRE(s.size() == 6);
  CHECK(s[0] == std::vector<std::size_t>{0, 1});
  CHECK(s[1] == std::vector<std::size_t>{0, 2});
  CHECK(s[2] == std::vector<std::size_t>{0, 3});
  CHECK(s[3] == std::vector<std::size_t>{1, 2});
  CHECK(s[4] == std::vector<std::size_t>{1, 3});
  CHECK(s[5] == std::vector<std::size_t>{2, 3});
  CHECK(column_subsets(4, 4).size() == 1);
  CHECK(column_subsets(8, 3).size() == 56);
}

TEST_CASE("GHC generator rotations") {
  SUBCASE("real, full matrices") {
    const Codebook cb = build_codebook(default_spec(CodebookFamily::GHC_REAL, 4, 4, 8));
    CHECK(cb.at(1) == gh_matrix(2, GoldenCase::REAL));
    CHECK(cb.at(3) == cb.at(1));
    for (std::size_t i = 1; i < cb.size(); ++i) CHECK(cb.at(i + 1) == cb.at(i).scaled(-1.0));
  }
  SUBCASE("complex, full matrices") {
    const Codebook cb = build_codebook(default_spec(CodebookFamily::GHC_COMPLEX, 4, 4, 8));
    CHECK(cb.at(3) == cb.at(1).scaled(-1.0));
    for (std::size_t i = 1; i < cb.size(); ++i) CHECK(cb.at(i + 1) == cb.at(i).scaled(-J));
  }
  SUBCASE("two-column subsets then rotations") {
    const Codebook cb = build_codebook(default_spec(CodebookFamily::GHC_REAL, 4, 2, 8));
    const ComplexMatrix base = gh_matrix(2, GoldenCase::REAL);
    const auto subsets = column_subsets(4, 2);
    for (std::size_t i = 0; i < 6; ++i) CHECK(cb.matrices[i] == base.columns(subsets[i]));
    CHECK(cb.at(7) == base.columns(subsets[0]));                 // (−1)^6
    CHECK(cb.at(8) == base.columns(subsets[1]).scaled(-1.0));    // (−1)^7
  }
}

TEST_CASE("HC and DC constructions") {
  const Codebook hc = build_codebook(default_spec(CodebookFamily::HC, 4, 2, 8));
  CHECK(hc.at(1) == ComplexMatrix{{0.5, 0.5}, {0.5, -0.5}, {0.5, 0.5}, {0.5, -0.5}});
  CHECK(hc.at(8) == hc.at(2).scaled(-1.0));

  const Codebook dc = build_codebook(default_spec(CodebookFamily::DC, 4, 2, 12));
  CHECK(dc.at(1) == ComplexMatrix{{1, 0}, {0, 1}, {0, 0}, {0, 0}});
  CHECK(dc.at(6) == ComplexMatrix{{0, 0}, {0, 0}, {1, 0}, {0, 1}});
  const Complex phase = std::polar(1.0, 2.0 * std::numbers::pi / 12.0);
  CHECK(max_abs_diff(dc.at(7), dc.at(1).scaled(phase)) < 1e-16);
}

TEST_CASE("DFTC construction") {
  CodebookSpec spec = default_spec(CodebookFamily::DFTC, 2, 2, 4);
  REQUIRE(spec.rotation_u == std::vector<int>{1, 7});
  const Codebook cb = build_codebook(spec);
  const ComplexMatrix theta = dft_rotation(spec);
  const ComplexMatrix expected = matmul(matmul(theta, theta), dft_matrix(2));
  CHECK(max_abs_diff(cb.at(3), expected) < 1e-15);

  const Codebook four = build_codebook(default_spec(CodebookFamily::DFTC, 4, 2, 64));
  for (const auto& w : four.matrices) {
    CHECK(std::sqrt(frobenius_norm_sq(matmul(hermitian(w), w) - ComplexMatrix::identity(2))) <= 1e-10);
  }
}

TEST_CASE("build_codebook validation and determinism") {
  CHECK_THROWS_AS(build_codebook(default_spec(CodebookFamily::HC, 4, 2, 0)), ConfigError);
  CHECK_THROWS_AS(build_codebook(default_spec(CodebookFamily::HC, 4, 5, 4)), ConfigError);
  CHECK_THROWS_AS(build_codebook(default_spec(CodebookFamily::HC, 6, 2, 4)), ConfigError);
  CodebookSpec no_u = default_spec(CodebookFamily::DFTC);
  no_u.rotation_u.clear();
  CHECK_THROWS_AS(build_codebook(no_u), ConfigError);

  for (auto f : all_families()) {
    const Codebook a = build_codebook(default_spec(f));
    const Codebook b = build_codebook(default_spec(f));
    CHECK(a.matrices == b.matrices);
    CHECK(a.size() == 64);
    for (const auto& w : a.matrices) {
      CHECK(w.rows() == 4);
      CHECK(w.cols() == 2);
    }
  }
}

TEST_CASE("GHCB text format") {
  const Codebook hc = build_codebook(default_spec(CodebookFamily::HC, 2, 2, 1));
  const std::string text = serialize_codebook(hc);
  CHECK(text ==
        "GHCB v1\n"
        "family=hc n_t=2 m=2 l=1 q=1 u=none n=none l_rot=0\n"
        "matrix i=1\n"
        "7.0710678118654746e-01+0.0000000000000000e+00j 7.0710678118654746e-01+0.0000000000000000e+00j\n"
        "7.0710678118654746e-01+0.0000000000000000e+00j -7.0710678118654746e-01-0.0000000000000000e+00j\n");
}

TEST_CASE("codebook files round trip exactly") {
  const auto path = temp_path("roundtrip.ghcb");
  for (auto f : all_families()) {
    const Codebook cb = build_codebook(default_spec(f));
    save_codebook(cb, path);
    const Codebook back = load_codebook(path);
    CHECK(back.spec == cb.spec);
    CHECK(back.matrices == cb.matrices);
    CHECK(codebook_digest(back) == codebook_digest(cb));
  }
  std::filesystem::remove(path);

  std::mt19937 gen(3);
  std::uniform_int_distribution<int> pick(0, 255);
  for (int trial = 0; trial < 20; ++trial) {
    CodebookSpec spec = default_spec(CodebookFamily::DFTC, 8, 2, 1 + pick(gen) % 40);
    for (auto& u : spec.rotation_u) u = pick(gen);
    spec.l_rot = 1 + pick(gen);
    const Codebook cb = build_codebook(spec);
    const Codebook back = parse_codebook(serialize_codebook(cb));
    CHECK(back.spec == cb.spec);
    CHECK(back.matrices == cb.matrices);
  }
}

TEST_CASE("codebook parse errors") {
  const std::string good = serialize_codebook(build_codebook(default_spec(CodebookFamily::GHC_REAL, 4, 2, 3)));

  SUBCASE("truncated mid-matrix") {
    const std::string cut = good.substr(0, good.size() - 60);
    CHECK_THROWS_AS(parse_codebook(cut), ParseError);
  }
  SUBCASE("missing matrix") {
    const auto last = good.find("matrix i=3");
    CHECK_THROWS_AS(parse_codebook(good.substr(0, last)), ValidationError);
  }
  SUBCASE("unknown version") {
    std::string v2 = good;
    v2.replace(0, 7, "GHCB v2");
    try {
      (void)parse_codebook(v2);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
    }
  }
  SUBCASE("row width mismatch") {
    std::string bad = good;
    const auto row = bad.find("matrix i=2\n") + 11;
    bad.insert(bad.find('\n', row), " 1.0+0.0j");
    CHECK_THROWS_AS(parse_codebook(bad), ValidationError);
  }
  SUBCASE("unknown metadata key") {
    std::string bad = good;
    bad.insert(bad.find("l_rot"), "extra=1 ");
    try {
      (void)parse_codebook(bad);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("bad entry reports its line") {
    std::string bad = good;
    const auto row = bad.find("matrix i=1\n") + 11;
    bad.replace(row, 4, "x.xx");
    try {
      (void)parse_codebook(bad);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 4);
    }
  }
  SUBCASE("empty input") { CHECK_THROWS_AS(parse_codebook(""), ParseError); }
  CHECK_THROWS_AS(load_codebook("/nonexistent/dir/cb.ghcb"), IoError);
}
