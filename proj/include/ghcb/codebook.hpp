#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ghcb/numerics.hpp"

namespace ghcb {

enum class CodebookFamily { DFTC, HC, DC, GHC_REAL, GHC_COMPLEX };

enum class GoldenCase { REAL, COMPLEX };

/// CLI/file spelling: dftc, hc, dc, ghc-real, ghc-complex.
std::string_view family_name(CodebookFamily family);
CodebookFamily parse_family(std::string_view name);
const std::vector<CodebookFamily>& all_families();

struct CodebookSpec {
  CodebookFamily family = CodebookFamily::GHC_REAL;
  int n_t = 4;
  int m = 2;
  int l = 64;
  /// DFTC only: per-antenna rotation indices.
  std::vector<int> rotation_u;
  /// DFTC only: phase base of the rotation; 0 means "use l".
  int l_rot = 0;
  /// GHC only: the root n used in the scale factor (sqrt 5 or sqrt 3).
  std::optional<double> golden_n;

  /// log2(n_t); throws ConfigError when n_t is not a power of two.
  int q() const;
  int rotation_base() const { return l_rot > 0 ? l_rot : l; }

  /// Throws ConfigError on the first violated invariant.
  void validate() const;

  friend bool operator==(const CodebookSpec&, const CodebookSpec&) = default;
};

/// Family defaults: DFTC gets u=[1,7,52,56]/64 for four antennas and u=[1,7]/4 for two;
/// GHC gets n = sqrt 5 (real) or sqrt 3 (complex).
CodebookSpec default_spec(CodebookFamily family, int n_t = 4, int m = 2, int l = 64);

struct Codebook {
  CodebookSpec spec;
  std::vector<ComplexMatrix> matrices;

  std::size_t size() const noexcept { return matrices.size(); }
  /// 1-based access, matching the generator index i = 1..L.
  const ComplexMatrix& at(std::size_t i) const;
};

ComplexMatrix sylvester_hadamard(int q);
Complex golden_number(GoldenCase golden_case);
double gh_scale(int q, double n);
ComplexMatrix gh_matrix(int q, GoldenCase golden_case);
ComplexMatrix dft_matrix(int n);
ComplexMatrix dft_rotation(const CodebookSpec& spec);

/// Lexicographic m-subsets of {0, ..., n-1}.
std::vector<std::vector<std::size_t>> column_subsets(std::size_t n, std::size_t m);

Codebook build_codebook(const CodebookSpec& spec);

void write_codebook(std::ostream& out, const Codebook& cb);
Codebook read_codebook(std::istream& in);
std::string serialize_codebook(const Codebook& cb);
Codebook parse_codebook(const std::string& text);

void save_codebook(const Codebook& cb, const std::filesystem::path& path);
Codebook load_codebook(const std::filesystem::path& path);

/// FNV-1a 64-bit hash of the serialized codebook, as 16 hex digits.
std::string codebook_digest(const Codebook& cb);

}  // namespace ghcb
