#include "ghcb/codebook.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "ghcb/error.hpp"

namespace ghcb {

namespace {

constexpr std::array<std::pair<CodebookFamily, std::string_view>, 5> kFamilyNames{{
    {CodebookFamily::DFTC, "dftc"},
    {CodebookFamily::HC, "hc"},
    {CodebookFamily::DC, "dc"},
    {CodebookFamily::GHC_REAL, "ghc-real"},
    {CodebookFamily::GHC_COMPLEX, "ghc-complex"},
}};

bool is_ghc(CodebookFamily f) {
  return f == CodebookFamily::GHC_REAL || f == CodebookFamily::GHC_COMPLEX;
}

double default_golden_n(CodebookFamily f) {
  return f == CodebookFamily::GHC_REAL ? std::sqrt(5.0) : std::sqrt(3.0);
}

Complex unit_phase(long long numerator, long long denominator) {
  // Reduce first so full turns land exactly on 1.
  long long r = numerator % denominator;
  if (r < 0) r += denominator;
  if (r == 0) return 1.0;
  if (2 * r == denominator) return -1.0;
  if (4 * r == denominator) return Complex(0.0, 1.0);
  if (4 * r == 3 * denominator) return Complex(0.0, -1.0);
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) /
                             static_cast<double>(denominator));
}

// θ/√ξ · [[H, H], [H, (θ⁻¹ − θ)H]] with H the order-(q−1) Sylvester matrix.
ComplexMatrix gh_matrix_with_root(int q, GoldenCase golden_case, double n) {
  if (q < 1) throw ConfigError("gh_matrix needs q >= 1, got " + std::to_string(q));
  const ComplexMatrix h = sylvester_hadamard(q - 1);
  const Complex theta = golden_number(golden_case);
  const Complex corner = 1.0 / theta - theta;
  const Complex scale = theta / std::sqrt(gh_scale(q, n));
  const std::size_t half = h.rows();
  ComplexMatrix out(2 * half, 2 * half);
  for (std::size_t i = 0; i < half; ++i) {
    for (std::size_t j = 0; j < half; ++j) {
      const Complex v = h(i, j);
      out(i, j) = scale * v;
      out(i, j + half) = scale * v;
      out(i + half, j) = scale * v;
      out(i + half, j + half) = scale * (corner * v);
    }
  }
  return out;
}

// Subset entries first, then rotation^(i−1) applied to subset (i−1) mod C.
std::vector<ComplexMatrix> subset_codebook(const ComplexMatrix& base, const CodebookSpec& spec,
                                           Complex rotation) {
  const auto subsets = column_subsets(base.cols(), static_cast<std::size_t>(spec.m));
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(spec.l));
  Complex power = 1.0;
  for (int i = 1; i <= spec.l; ++i) {
    const auto& subset = subsets[static_cast<std::size_t>(i - 1) % subsets.size()];
    ComplexMatrix w = base.columns(subset);
    if (static_cast<std::size_t>(i) > subsets.size()) w = w.scaled(power);
    out.push_back(std::move(w));
    power *= rotation;
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string format_complex(Complex z) {
  return format_double(z.real()) + (std::signbit(z.imag()) ? '-' : '+') +
         format_double(std::abs(z.imag())) + 'j';
}

double parse_double(std::string_view text, std::size_t line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError(line, "bad number '" + std::string(text) + "'");
  }
  return v;
}

int parse_int(std::string_view text, std::size_t line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, "bad integer '" + std::string(text) + "'");
  }
  return v;
}

Complex parse_complex(std::string_view token, std::size_t line) {
  if (token.size() < 2 || token.back() != 'j') {
    throw ParseError(line, "bad complex entry '" + std::string(token) + "'");
  }
  token.remove_suffix(1);
  std::size_t split = std::string_view::npos;
  for (std::size_t k = 1; k < token.size(); ++k) {
    if ((token[k] == '+' || token[k] == '-') && token[k - 1] != 'e' && token[k - 1] != 'E') {
      split = k;
    }
  }
  if (split == std::string_view::npos) {
    throw ParseError(line, "complex entry without imaginary part '" + std::string(token) + "j'");
  }
  const double re = parse_double(token.substr(0, split), line);
  double im = parse_double(token.substr(split + 1), line);
  if (token[split] == '-') im = -im;
  return {re, im};
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::string_view family_name(CodebookFamily family) {
  for (const auto& [f, name] : kFamilyNames)
    if (f == family) return name;
  return "unknown";
}

CodebookFamily parse_family(std::string_view name) {
  for (const auto& [f, n] : kFamilyNames)
    if (n == name) return f;
  throw ConfigError("unknown codebook family '" + std::string(name) + "'");
}

const std::vector<CodebookFamily>& all_families() {
  static const std::vector<CodebookFamily> families{
      CodebookFamily::DFTC, CodebookFamily::DC, CodebookFamily::HC, CodebookFamily::GHC_REAL,
      CodebookFamily::GHC_COMPLEX};
  return families;
}

int CodebookSpec::q() const {
  if (n_t < 2 || !std::has_single_bit(static_cast<unsigned>(n_t))) {
    throw ConfigError("n_t must be a power of two >= 2, got " + std::to_string(n_t));
  }
  return std::countr_zero(static_cast<unsigned>(n_t));
}

void CodebookSpec::validate() const {
  const int order = q();
  if (order > 8) throw ConfigError("n_t above 256 is not supported");
  if (m < 1 || m > n_t) {
    throw ConfigError("m must satisfy 1 <= m <= n_t, got m=" + std::to_string(m) +
                      " n_t=" + std::to_string(n_t));
  }
  if (l < 1) throw ConfigError("codebook size l must be >= 1, got " + std::to_string(l));
  if (l_rot < 0) throw ConfigError("l_rot must be >= 0");
  if (family == CodebookFamily::DFTC) {
    if (rotation_u.size() != static_cast<std::size_t>(n_t)) {
      throw ConfigError("DFTC needs rotation_u with " + std::to_string(n_t) + " entries, got " +
                        std::to_string(rotation_u.size()));
    }
  } else if (!rotation_u.empty()) {
    throw ConfigError("rotation_u is only meaningful for DFTC");
  }
  if (is_ghc(family)) {
    if (golden_n && !(*golden_n > 1.0)) throw ConfigError("golden root n must exceed 1");
  } else if (golden_n) {
    throw ConfigError("golden root n is only meaningful for GHC families");
  }
}

CodebookSpec default_spec(CodebookFamily family, int n_t, int m, int l) {
  CodebookSpec spec;
  spec.family = family;
  spec.n_t = n_t;
  spec.m = m;
  spec.l = l;
  if (family == CodebookFamily::DFTC) {
    if (n_t == 4) {
      spec.rotation_u = {1, 7, 52, 56};
      spec.l_rot = 64;
    } else if (n_t == 2) {
      spec.rotation_u = {1, 7};
      spec.l_rot = 4;
    } else {
      for (int k = 0; k < n_t; ++k) spec.rotation_u.push_back(2 * k + 1);
    }
  }
  if (is_ghc(family)) spec.golden_n = default_golden_n(family);
  return spec;
}

const ComplexMatrix& Codebook::at(std::size_t i) const {
  if (i < 1 || i > matrices.size()) {
    throw RangeError("codebook index " + std::to_string(i) + " outside 1.." +
                     std::to_string(matrices.size()));
  }
  return matrices[i - 1];
}

ComplexMatrix sylvester_hadamard(int q) {
  if (q < 0 || q > 8) throw ConfigError("sylvester_hadamard order q must be in 0..8");
  ComplexMatrix h{{1.0}};
  for (int level = 0; level < q; ++level) {
    const std::size_t n = h.rows();
    ComplexMatrix next(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        next(i, j) = h(i, j);
        next(i, j + n) = h(i, j);
        next(i + n, j) = h(i, j);
        next(i + n, j + n) = -h(i, j);
      }
    }
    h = std::move(next);
  }
  return h;
}

Complex golden_number(GoldenCase golden_case) {
  if (golden_case == GoldenCase::REAL) return (1.0 + std::sqrt(5.0)) / 2.0;
  return Complex(std::sqrt(3.0), 1.0) / 2.0;
}

double gh_scale(int q, double n) {
  return n * (std::pow(1.0 + n, q) - std::pow(1.0 - n, q)) / std::pow(2.0, q);
}

ComplexMatrix gh_matrix(int q, GoldenCase golden_case) {
  const double n = golden_case == GoldenCase::REAL ? std::sqrt(5.0) : std::sqrt(3.0);
  return gh_matrix_with_root(q, golden_case, n);
}

ComplexMatrix dft_matrix(int n) {
  if (n < 1) throw ConfigError("dft_matrix needs n >= 1");
  ComplexMatrix out(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      out(static_cast<std::size_t>(k), static_cast<std::size_t>(l)) =
          norm * unit_phase(static_cast<long long>(k) * l, n);
  return out;
}

namespace {

ComplexMatrix rotation_power(const CodebookSpec& spec, long long power) {
  if (spec.family != CodebookFamily::DFTC) {
    throw ConfigError("rotation is only defined for the DFTC family");
  }
  if (spec.rotation_u.size() != static_cast<std::size_t>(spec.n_t)) {
    throw ConfigError("DFTC rotation needs rotation_u with n_t entries");
  }
  const auto n = static_cast<std::size_t>(spec.n_t);
  ComplexMatrix theta(n, n);
  for (std::size_t k = 0; k < n; ++k)
    theta(k, k) = unit_phase(spec.rotation_u[k] * power, spec.rotation_base());
  return theta;
}

}  // namespace

ComplexMatrix dft_rotation(const CodebookSpec& spec) { return rotation_power(spec, 1); }

std::vector<std::vector<std::size_t>> column_subsets(std::size_t n, std::size_t m) {
  std::vector<std::vector<std::size_t>> out;
  if (m == 0 || m > n) return out;
  std::vector<std::size_t> current(m);
  for (std::size_t i = 0; i < m; ++i) current[i] = i;
  while (true) {
    out.push_back(current);
    std::size_t i = m;
    while (i > 0 && current[i - 1] == n - m + (i - 1)) --i;
    if (i == 0) break;
    ++current[i - 1];
    for (std::size_t j = i; j < m; ++j) current[j] = current[j - 1] + 1;
  }
  return out;
}

Codebook build_codebook(const CodebookSpec& spec) {
  spec.validate();
  const int q = spec.q();
  Codebook cb;
  cb.spec = spec;
  switch (spec.family) {
    case CodebookFamily::DFTC: {
      std::vector<std::size_t> first(static_cast<std::size_t>(spec.m));
      for (std::size_t k = 0; k < first.size(); ++k) first[k] = k;
      const ComplexMatrix w1 = dft_matrix(spec.n_t).columns(first);
      for (int i = 1; i <= spec.l; ++i) cb.matrices.push_back(matmul(rotation_power(spec, i - 1), w1));
      break;
    }
    case CodebookFamily::HC: {
      const ComplexMatrix base =
          sylvester_hadamard(q).scaled(1.0 / std::sqrt(static_cast<double>(spec.n_t)));
      cb.matrices = subset_codebook(base, spec, -1.0);
      break;
    }
    case CodebookFamily::GHC_REAL:
    case CodebookFamily::GHC_COMPLEX: {
      const auto golden_case =
          spec.family == CodebookFamily::GHC_REAL ? GoldenCase::REAL : GoldenCase::COMPLEX;
      const double n = spec.golden_n.value_or(default_golden_n(spec.family));
      const Complex rotation = golden_case == GoldenCase::REAL ? Complex(-1.0) : Complex(0.0, -1.0);
      cb.matrices = subset_codebook(gh_matrix_with_root(q, golden_case, n), spec, rotation);
      break;
    }
    case CodebookFamily::DC: {
      const auto subsets =
          column_subsets(static_cast<std::size_t>(spec.n_t), static_cast<std::size_t>(spec.m));
      for (int i = 1; i <= spec.l; ++i) {
        const auto idx = static_cast<std::size_t>(i - 1);
        const auto& subset = subsets[idx % subsets.size()];
        const Complex phase =
            unit_phase(static_cast<long long>(idx / subsets.size()), spec.l);
        ComplexMatrix w(static_cast<std::size_t>(spec.n_t), subset.size());
        for (std::size_t k = 0; k < subset.size(); ++k) w(subset[k], k) = phase;
        cb.matrices.push_back(std::move(w));
      }
      break;
    }
  }
  return cb;
}

void write_codebook(std::ostream& out, const Codebook& cb) {
  const CodebookSpec& s = cb.spec;
  out << "GHCB v1\n";
  out << "family=" << family_name(s.family) << " n_t=" << s.n_t << " m=" << s.m << " l=" << s.l
      << " q=" << s.q() << " u=";
  if (s.rotation_u.empty()) {
    out << "none";
  } else {
    for (std::size_t k = 0; k < s.rotation_u.size(); ++k) out << (k ? "," : "") << s.rotation_u[k];
  }
  out << " n=" << (s.golden_n ? format_double(*s.golden_n) : std::string("none"))
      << " l_rot=" << s.l_rot << '\n';
  for (std::size_t i = 0; i < cb.matrices.size(); ++i) {
    const ComplexMatrix& w = cb.matrices[i];
    out << "matrix i=" << i + 1 << '\n';
    for (std::size_t r = 0; r < w.rows(); ++r) {
      for (std::size_t c = 0; c < w.cols(); ++c) out << (c ? " " : "") << format_complex(w(r, c));
      out << '\n';
    }
  }
}

Codebook read_codebook(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&](const char* expecting) {
    if (!std::getline(in, line)) {
      throw ParseError(line_no + 1, std::string("unexpected end of file, expecting ") + expecting);
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  next_line("header");
  if (line.rfind("GHCB ", 0) != 0) throw ParseError(line_no, "missing GHCB header");
  if (line != "GHCB v1") throw ParseError(line_no, "unsupported version '" + line.substr(5) + "'");

  next_line("metadata");
  std::map<std::string, std::string, std::less<>> kv;
  for (auto token : split_ws(line)) {
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value");
    std::string key(token.substr(0, eq));
    if (kv.count(key)) throw ParseError(line_no, "duplicate key '" + key + "'");
    kv.emplace(std::move(key), std::string(token.substr(eq + 1)));
  }
  static const std::array<std::string_view, 8> kKeys{"family", "n_t", "m", "l",
                                                     "q",      "u",   "n", "l_rot"};
  for (const auto& [key, value] : kv) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
      throw ParseError(line_no, "unknown key '" + key + "'");
  }
  for (auto key : kKeys) {
    if (!kv.count(key)) throw ParseError(line_no, "missing key '" + std::string(key) + "'");
  }

  Codebook cb;
  CodebookSpec& s = cb.spec;
  try {
    s.family = parse_family(kv["family"]);
  } catch (const ConfigError& e) {
    throw ParseError(line_no, e.what());
  }
  s.n_t = parse_int(kv["n_t"], line_no);
  s.m = parse_int(kv["m"], line_no);
  s.l = parse_int(kv["l"], line_no);
  s.l_rot = parse_int(kv["l_rot"], line_no);
  const int q = parse_int(kv["q"], line_no);
  if (kv["u"] != "none") {
    std::string_view u = kv["u"];
    while (true) {
      const auto comma = u.find(',');
      s.rotation_u.push_back(parse_int(u.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      u.remove_prefix(comma + 1);
    }
  }
  if (kv["n"] != "none") s.golden_n = parse_double(kv["n"], line_no);
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
  }
  if (q != s.q()) {
    throw ValidationError("line " + std::to_string(line_no) + ": q=" + std::to_string(q) +
                          " inconsistent with n_t=" + std::to_string(s.n_t));
  }

  const auto rows = static_cast<std::size_t>(s.n_t);
  const auto cols = static_cast<std::size_t>(s.m);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string expected = "matrix i=" + std::to_string(cb.matrices.size() + 1);
    if (line != expected) {
      throw ParseError(line_no, "expected '" + expected + "', got '" + line + "'");
    }
    if (cb.matrices.size() == static_cast<std::size_t>(s.l)) {
      throw ValidationError("line " + std::to_string(line_no) + ": more matrices than l=" +
                            std::to_string(s.l));
    }
    std::vector<Complex> data;
    data.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      next_line("matrix row");
      const auto tokens = split_ws(line);
      if (tokens.size() != cols) {
        // A short last line with no newline is a cut-off file, not a shape problem.
        if (in.eof()) throw ParseError(line_no, "file truncated inside matrix row");
        throw ValidationError("line " + std::to_string(line_no) + ": row has " +
                              std::to_string(tokens.size()) + " entries, expected m=" +
                              std::to_string(cols));
      }
      for (auto t : tokens) data.push_back(parse_complex(t, line_no));
    }
    cb.matrices.emplace_back(rows, cols, std::move(data));
  }
  if (cb.matrices.size() != static_cast<std::size_t>(s.l)) {
    throw ValidationError("declared l=" + std::to_string(s.l) + " but found " +
                          std::to_string(cb.matrices.size()) + " matrices");
  }
  return cb;
}

std::string serialize_codebook(const Codebook& cb) {
  std::ostringstream out;
  write_codebook(out, cb);
  return out.str();
}

Codebook parse_codebook(const std::string& text) {
  std::istringstream in(text);
  return read_codebook(in);
}

void save_codebook(const Codebook& cb, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_codebook(out, cb);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Codebook load_codebook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_codebook(in);
}

std::string codebook_digest(const Codebook& cb) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_codebook(cb)) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace ghcb
