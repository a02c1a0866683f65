#include "ghcb/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ghcb/codebook.hpp"
#include "ghcb/error.hpp"
#include "ghcb/metrics.hpp"
#include "ghcb/sim.hpp"

namespace ghcb::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("bad number for " + what + ": '" + s + "'");
  }
  return v;
}

long long to_int(const std::string& s, const std::string& what) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("bad integer for " + what + ": '" + s + "'");
  }
  return v;
}

std::uint64_t to_count(const std::string& s, const std::string& what) {
  const long long v = to_int(s, what);
  if (v < 0) throw ConfigError(what + " must be non-negative");
  return static_cast<std::uint64_t>(v);
}

bool to_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("bad boolean for " + what + ": '" + s + "'");
}

std::vector<double> to_doubles(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(to_double(part, what));
  return out;
}

std::vector<int> to_ints(const std::string& s, const std::string& what) {
  std::vector<int> out;
  for (const auto& part : split(s, ',')) out.push_back(static_cast<int>(to_int(part, what)));
  return out;
}

// Accepts "a", "a+bj", "a-bj", "bj".
Complex to_complex(std::string s) {
  s = trim(s);
  if (s.empty()) throw ConfigError("empty complex entry");
  if (s.back() != 'j') return to_double(s, "h");
  s.pop_back();
  std::size_t split_at = std::string::npos;
  for (std::size_t k = 1; k < s.size(); ++k)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') split_at = k;
  if (split_at == std::string::npos) return {0.0, s.empty() ? 1.0 : to_double(s, "h")};
  return {to_double(s.substr(0, split_at), "h"), to_double(s.substr(split_at), "h")};
}

std::vector<CodebookFamily> to_families(const std::string& s) {
  if (s == "all") return all_families();
  std::vector<CodebookFamily> out;
  for (const auto& name : split(s, ',')) out.push_back(parse_family(name));
  return out;
}

int n_t_from_q(int q) {
  if (q < 1 || q > 8) throw ConfigError("q must be in 1..8, got " + std::to_string(q));
  return 1 << q;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Subset families only have C(n_t, m) distinct subspaces; DFTC keeps the six-bit size.
int table_size(CodebookFamily f, int n_t, int m) {
  if (f == CodebookFamily::DFTC) return 64;
  return static_cast<int>(binomial(static_cast<std::size_t>(n_t), static_cast<std::size_t>(m)));
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

struct Common {
  std::uint64_t seed = 1;
  bool json = false;
  unsigned threads = 1;
  std::string config_path;
  std::string out_path;
};

void add_common(CLI::App* sub, Common& c, bool with_output) {
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_flag("--json", c.json, "Machine-readable JSON on standard output");
  sub->add_option("--threads", c.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 1024u));
  sub->add_option("--config", c.config_path, "key=value configuration file");
  if (with_output) sub->add_option("-o,--output", c.out_path, "Output path");
}

// ---------------------------------------------------------------- codebook

struct CodebookArgs {
  std::string family = "ghc-real";
  int q = 2;
  int m = 2;
  int l = 64;
  std::string u;
  int l_rot = -1;
  std::optional<double> n;
};

CodebookSpec spec_from(const std::string& family_text, int q, int m, int l, const std::string& u,
                       int l_rot, std::optional<double> n) {
  const CodebookFamily family = parse_family(family_text);
  CodebookSpec spec = default_spec(family, n_t_from_q(q), m, l);
  if (!u.empty()) {
    if (family != CodebookFamily::DFTC) throw ConfigError("--u only applies to dftc");
    spec.rotation_u = to_ints(u, "u");
    if (l_rot < 0) spec.l_rot = 0;
  }
  if (l_rot >= 0) spec.l_rot = l_rot;
  if (n) spec.golden_n = *n;
  spec.validate();
  return spec;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

int cmd_codebook(const CodebookArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  if (c.out_path.empty()) {
    err << "codebook: -o <path> is required\n";
    return kUsage;
  }
  const CodebookSpec spec = spec_from(a.family, a.q, a.m, a.l, a.u, a.l_rot, a.n);
  const Codebook cb = build_codebook(spec);
  save_codebook(cb, c.out_path);
  std::optional<McdReport> mcd;
  if (cb.size() >= 2) mcd = min_chordal_distance(cb);
  if (c.json) {
    nlohmann::json j = {{"path", c.out_path},
                        {"family", family_name(spec.family)},
                        {"l", cb.size()},
                        {"digest", codebook_digest(cb)}};
    if (!spec.rotation_u.empty()) j["u"] = spec.rotation_u;
    j["mcd"] = mcd ? nlohmann::json(mcd->value) : nlohmann::json(nullptr);
    out << j.dump() << '\n';
    return kOk;
  }
  if (!spec.rotation_u.empty()) {
    out << "u=" << join_ints(spec.rotation_u) << " l_rot=" << spec.rotation_base() << '\n';
  }
  out << "L=" << cb.size();
  if (mcd) {
    out << " MCD=" << fixed(mcd->value, 4) << " (pair " << mcd->argmin_pair.first << ","
        << mcd->argmin_pair.second << ")";
  }
  out << " -> " << c.out_path << '\n';
  return kOk;
}

// ---------------------------------------------------------------- tables

struct TablesArgs {
  std::string which;
  int q = 2;
  int m = 2;
  int l = 0;
  std::string families = "all";
};

int cmd_tables(const TablesArgs& a, const Common& c, std::ostream& out) {
  const int n_t = n_t_from_q(a.q);
  const auto families = to_families(a.families);
  nlohmann::json rows = nlohmann::json::array();
  if (a.which == "mcd") {
    if (!c.json) out << "family       L    mcd      mcd_first  argmin\n";
    for (auto f : families) {
      const int l = a.l > 0 ? a.l : table_size(f, n_t, a.m);
      const Codebook cb = build_codebook(default_spec(f, n_t, a.m, l));
      const McdReport r = min_chordal_distance(cb);
      if (c.json) {
        rows.push_back({{"family", family_name(f)},
                        {"l", l},
                        {"value", r.value},
                        {"first_matrix_value", r.first_matrix_value},
                        {"argmin_pair", {r.argmin_pair.first, r.argmin_pair.second}}});
      } else {
        std::ostringstream line;
        line << std::left << std::setw(12) << family_name(f) << ' ' << std::setw(4) << l << ' '
             << std::setw(8) << fixed(r.value, 4) << ' ' << std::setw(10)
             << fixed(r.first_matrix_value, 4) << ' ' << r.argmin_pair.first << ','
             << r.argmin_pair.second;
        out << line.str() << '\n';
      }
    }
  } else {
    if (!c.json) out << "family       b  md       delta_inf\n";
    for (auto f : families) {
      const int l = a.l > 0 ? a.l : table_size(f, n_t, a.m);
      const Codebook cb = build_codebook(default_spec(f, n_t, a.m, l));
      for (int b : {4, 6}) {
        const MdReport r = min_determinant(cb, b);
        if (c.json) {
          nlohmann::json row = to_json(r);
          row["family"] = family_name(f);
          row["l"] = l;
          rows.push_back(row);
        } else {
          std::ostringstream line;
          line << std::left << std::setw(12) << family_name(f) << ' ' << std::setw(2) << b << ' '
               << std::setw(8) << fixed(r.reported, 4) << ' ' << fixed(r.delta_inf, 6);
          out << line.str() << '\n';
        }
      }
    }
  }
  if (c.json) out << nlohmann::json{{"table", a.which}, {"q", a.q}, {"m", a.m}, {"rows", rows}}.dump() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- ber

struct BerArgs {
  std::string families;
  std::optional<int> q, m, l, l_rot, b;
  std::string u;
  std::string snr_grid;
  std::optional<double> snr_min, snr_max, snr_step;
  std::string feedback;
  std::optional<double> fd_tc, delta;
  std::optional<std::uint64_t> min_trials, min_bit_errors, max_trials;
  std::optional<bool> renormalize;
  bool dry_run = false;
};

struct BerPlan {
  std::vector<CodebookFamily> families = all_families();
  int q = 2, m = 2, l = 64, l_rot = -1, b = 4;
  std::vector<int> u;
  std::vector<double> snr_grid = default_snr_grid();
  std::string feedback = "perfect";
  double fd_tc = 0.01, delta = 12.0;
  std::uint64_t min_trials = 10000, min_bit_errors = 200, max_trials = 10'000'000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool renormalize = false;
};

std::vector<double> grid_from_range(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw ConfigError("bad SNR range");
  std::vector<double> g;
  for (int k = 0; lo + k * step <= hi + 1e-9; ++k) g.push_back(lo + k * step);
  return g;
}

void apply_config_file(BerPlan& p, const std::map<std::string, std::string>& kv, bool& seed_set,
                       bool& threads_set) {
  std::optional<double> lo, hi, step;
  for (const auto& [key, value] : kv) {
    if (key == "families") p.families = to_families(value);
    else if (key == "q") p.q = static_cast<int>(to_int(value, key));
    else if (key == "m") p.m = static_cast<int>(to_int(value, key));
    else if (key == "l") p.l = static_cast<int>(to_int(value, key));
    else if (key == "l_rot") p.l_rot = static_cast<int>(to_int(value, key));
    else if (key == "u") p.u = to_ints(value, key);
    else if (key == "b") p.b = static_cast<int>(to_int(value, key));
    else if (key == "snr_grid") p.snr_grid = to_doubles(value, key);
    else if (key == "snr_min") lo = to_double(value, key);
    else if (key == "snr_max") hi = to_double(value, key);
    else if (key == "snr_step") step = to_double(value, key);
    else if (key == "feedback") p.feedback = value;
    else if (key == "fd_tc") p.fd_tc = to_double(value, key);
    else if (key == "delta") p.delta = to_double(value, key);
    else if (key == "min_trials") p.min_trials = to_count(value, key);
    else if (key == "min_bit_errors") p.min_bit_errors = to_count(value, key);
    else if (key == "max_trials") p.max_trials = to_count(value, key);
    else if (key == "seed") { p.seed = to_count(value, key); seed_set = true; }
    else if (key == "threads") { p.threads = static_cast<unsigned>(to_count(value, key)); threads_set = true; }
    else if (key == "renormalize") p.renormalize = to_bool(value, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  if (lo || hi || step) p.snr_grid = grid_from_range(lo.value_or(0.0), hi.value_or(30.0), step.value_or(2.0));
}

std::string grid_text(const std::vector<double>& g) {
  std::ostringstream os;
  for (std::size_t i = 0; i < g.size(); ++i) os << (i ? "," : "") << g[i];
  return os.str();
}

std::string families_text(const std::vector<CodebookFamily>& fs) {
  std::string s;
  for (std::size_t i = 0; i < fs.size(); ++i) s += (i ? "," : "") + std::string(family_name(fs[i]));
  return s;
}

SimConfig make_sim_config(const BerPlan& p, CodebookFamily family) {
  SimConfig cfg;
  const std::string u = p.u.empty() ? std::string() : join_ints(p.u);
  cfg.codebook_spec = spec_from(std::string(family_name(family)), p.q, p.m, p.l,
                                family == CodebookFamily::DFTC ? u : std::string(), p.l_rot,
                                std::nullopt);
  cfg.b = p.b;
  cfg.snr_grid_db = p.snr_grid;
  if (p.feedback == "perfect") {
    cfg.feedback = FeedbackModel::perfect();
  } else if (p.feedback == "delayed") {
    cfg.feedback = FeedbackModel::delayed(p.fd_tc, p.delta);
  } else {
    throw ConfigError("feedback must be 'perfect' or 'delayed', got '" + p.feedback + "'");
  }
  cfg.min_trials = p.min_trials;
  cfg.min_bit_errors = p.min_bit_errors;
  cfg.max_trials = p.max_trials;
  cfg.seed = p.seed;
  cfg.renormalize_precoders = p.renormalize;
  cfg.validate();
  return cfg;
}

std::string gnuplot_stub(const std::string& prefix, const std::vector<CodebookFamily>& fs) {
  std::string s =
      "set logscale y\nset xlabel 'SNR (dB)'\nset ylabel 'BER'\nset datafile separator ','\n"
      "set key top right\nplot ";
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const std::string file = prefix + "_" + std::string(family_name(fs[i])) + ".csv";
    s += (i ? ", \\\n     " : "") + ("'" + file + "' every ::1 using 1:2 with linespoints title '" +
                                    std::string(family_name(fs[i])) + "'");
  }
  return s + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

int cmd_ber(const BerArgs& a, const Common& c, bool seed_flag, bool threads_flag, std::ostream& out,
            std::ostream& err) {
  BerPlan p;
  bool seed_set = false;
  bool threads_set = false;
  if (!c.config_path.empty()) apply_config_file(p, parse_config_text(read_file(c.config_path)), seed_set, threads_set);
  if (!a.families.empty()) p.families = to_families(a.families);
  if (a.q) p.q = *a.q;
  if (a.m) p.m = *a.m;
  if (a.l) p.l = *a.l;
  if (a.l_rot) p.l_rot = *a.l_rot;
  if (a.b) p.b = *a.b;
  if (!a.u.empty()) p.u = to_ints(a.u, "u");
  if (!a.snr_grid.empty()) p.snr_grid = to_doubles(a.snr_grid, "snr-grid");
  if (a.snr_min || a.snr_max || a.snr_step) {
    p.snr_grid = grid_from_range(a.snr_min.value_or(0.0), a.snr_max.value_or(30.0), a.snr_step.value_or(2.0));
  }
  if (!a.feedback.empty()) p.feedback = a.feedback;
  if (a.fd_tc) p.fd_tc = *a.fd_tc;
  if (a.delta) p.delta = *a.delta;
  if (a.min_trials) p.min_trials = *a.min_trials;
  if (a.min_bit_errors) p.min_bit_errors = *a.min_bit_errors;
  if (a.max_trials) p.max_trials = *a.max_trials;
  if (a.renormalize) p.renormalize = *a.renormalize;
  if (seed_flag || !seed_set) p.seed = c.seed;
  if (threads_flag || !threads_set) p.threads = c.threads;
  if (p.threads < 1) throw ConfigError("threads must be >= 1");

  std::vector<SimConfig> configs;
  for (auto f : p.families) configs.push_back(make_sim_config(p, f));
  const double alpha = configs.front().feedback.alpha();

  if (a.dry_run) {
    out << "families=" << families_text(p.families) << "\nq=" << p.q << "\nm=" << p.m
        << "\nl=" << p.l << "\nb=" << p.b << "\nsnr_grid=" << grid_text(p.snr_grid)
        << "\nfeedback=" << p.feedback << "\nfd_tc=" << p.fd_tc << "\ndelta=" << p.delta
        << "\nalpha=" << fixed(alpha, 6) << "\nmin_trials=" << p.min_trials
        << "\nmin_bit_errors=" << p.min_bit_errors << "\nmax_trials=" << p.max_trials
        << "\nseed=" << p.seed << "\nthreads=" << p.threads
        << "\nrenormalize=" << (p.renormalize ? "true" : "false") << '\n';
    if (!p.u.empty()) out << "u=" << join_ints(p.u) << '\n';
    return kOk;
  }
  if (c.out_path.empty()) {
    err << "ber: -o <prefix> is required\n";
    return kUsage;
  }

  err << "feedback=" << p.feedback << " alpha=" << fixed(alpha, 4) << '\n';
  nlohmann::json all = nlohmann::json::array();
  for (const SimConfig& cfg : configs) {
    const std::string name(family_name(cfg.codebook_spec.family));
    SweepResult result;
    result.config = cfg;
    const Codebook cb = simulation_codebook(cfg);
    result.codebook_digest = codebook_digest(cb);
    const auto t0 = std::chrono::steady_clock::now();
    for (double snr : cfg.snr_grid_db) {
      const BerPoint pt = run_ber_point(cfg, cb, snr, p.threads);
      err << name << " snr=" << snr << " trials=" << pt.trials << " errors=" << pt.bit_errors
          << (pt.low_confidence ? " (low confidence)" : "") << '\n';
      result.points.push_back(pt);
    }
    result.wallclock = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_file(c.out_path + "_" + name + ".csv", to_csv(result));
    write_file(c.out_path + "_" + name + ".json", to_json(result).dump(2) + "\n");
    if (c.json) {
      all.push_back(to_json(result));
    } else {
      out << "# " << name << " alpha=" << fixed(alpha, 4) << '\n';
      for (const auto& pt : result.points) {
        out << name << ' ' << pt.snr_db << ' ' << pt.ber << ' ' << pt.bit_errors << ' ' << pt.trials
            << (pt.low_confidence ? " low-confidence" : "") << '\n';
      }
    }
  }
  write_file(c.out_path + ".gp", gnuplot_stub(c.out_path, p.families));
  if (c.json) out << all.dump() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- bound

struct BoundArgs {
  std::string snr_db = "0,5,10,15,20,25,30";
  std::string h;
  int samples = 0;
  int n_entries = 2;
  int q = 2;
  int b = 4;
  double theta_sq = kThetaSqLiteral;
};

int cmd_bound(const BoundArgs& a, const Common& c, std::ostream& out) {
  const std::vector<double> grid = to_doubles(a.snr_db, "snr-db");
  for (double s : grid)
    if (s < 0.0) throw ConfigError("--snr-db must be >= 0 dB, got " + fixed(s, 2));
  if (a.h.empty() == (a.samples == 0)) throw ConfigError("give exactly one of --h or --samples");
  if (a.q < 0 || a.q > 8) throw ConfigError("q must be in 0..8");
  const QamConstellation constellation(a.b, true);
  nlohmann::json rows = nlohmann::json::array();
  std::optional<ComplexMatrix> h;
  if (!a.h.empty()) {
    std::vector<Complex> entries;
    for (const auto& part : split(a.h, ',')) entries.push_back(to_complex(part));
    h = ComplexMatrix::column(entries);
  } else if (a.samples < 0 || a.n_entries < 1) {
    throw ConfigError("--samples and --n-entries must be positive");
  }
  for (double snr_db : grid) {
    const double snr = std::pow(10.0, snr_db / 10.0);
    double pep = 0.0;
    double raw = 0.0;
    if (h) {
      pep = pep_chernoff(*h, snr, a.q, a.theta_sq);
      raw = ber_union_bound(constellation, *h, snr, a.q, a.theta_sq).raw;
    } else {
      raw = mean_union_bound(constellation, a.n_entries, a.q, snr_db, a.samples, c.seed, a.theta_sq);
      pep = raw / average_hamming_weight(constellation);
    }
    const double clipped = std::clamp(raw, 0.0, 1.0);
    if (c.json) {
      rows.push_back({{"snr_db", snr_db}, {"pep", pep}, {"union_raw", raw}, {"union", clipped}});
    } else {
      out << "snr_db=" << snr_db << " pep=" << std::setprecision(6) << pep << " union_raw=" << raw
          << " union=" << clipped << '\n';
    }
  }
  if (c.json) {
    out << nlohmann::json{{"theta_sq", a.theta_sq}, {"q", a.q}, {"b", a.b}, {"rows", rows}}.dump()
        << '\n';
  }
  return kOk;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key=value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, "empty key");
    if (kv.count(key)) throw ParseError(line_no, "duplicate key '" + key + "'");
    kv.emplace(std::move(key), trim(line.substr(eq + 1)));
  }
  return kv;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Golden-Hadamard precoded Alamouti codebooks: design, metrics and BER simulation",
               "ghcb"};
  app.require_subcommand(1);

  Common common;

  CodebookArgs cb_args;
  auto* cb_cmd = app.add_subcommand("codebook", "Generate a codebook and write it as GHCB v1");
  cb_cmd->add_option("--family", cb_args.family, "dftc, hc, dc, ghc-real or ghc-complex");
  cb_cmd->add_option("--q", cb_args.q, "log2 of the transmit antenna count");
  cb_cmd->add_option("--m", cb_args.m, "Precoder columns");
  cb_cmd->add_option("--l", cb_args.l, "Codebook size");
  cb_cmd->add_option("--u", cb_args.u, "DFTC rotation indices, comma separated");
  cb_cmd->add_option("--l-rot", cb_args.l_rot, "DFTC rotation phase base (default: l)");
  cb_cmd->add_option("--n", cb_args.n, "GHC golden root n");
  add_common(cb_cmd, common, true);

  TablesArgs tb_args;
  auto* tb_cmd = app.add_subcommand("tables", "Print MCD or MD tables per family");
  tb_cmd->add_option("which", tb_args.which, "mcd or md")->required()->check(CLI::IsMember({"mcd", "md"}));
  tb_cmd->add_option("--q", tb_args.q, "log2 of the transmit antenna count");
  tb_cmd->add_option("--m", tb_args.m, "Precoder columns");
  tb_cmd->add_option("--l", tb_args.l, "Codebook size (default: 64 for dftc, C(n_t, m) otherwise)");
  tb_cmd->add_option("--families", tb_args.families, "Comma-separated families or 'all'");
  add_common(tb_cmd, common, false);

  BerArgs ber_args;
  auto* ber_cmd = app.add_subcommand("ber", "Monte-Carlo BER sweep per family");
  ber_cmd->add_option("--families", ber_args.families, "Comma-separated families or 'all'");
  ber_cmd->add_option("--q", ber_args.q);
  ber_cmd->add_option("--m", ber_args.m);
  ber_cmd->add_option("--l", ber_args.l);
  ber_cmd->add_option("--l-rot", ber_args.l_rot);
  ber_cmd->add_option("--u", ber_args.u, "DFTC rotation indices");
  ber_cmd->add_option("--b", ber_args.b, "Bits per QAM symbol (2, 4, 6)");
  ber_cmd->add_option("--snr-grid", ber_args.snr_grid, "Comma-separated SNR list in dB");
  ber_cmd->add_option("--snr-min", ber_args.snr_min);
  ber_cmd->add_option("--snr-max", ber_args.snr_max);
  ber_cmd->add_option("--snr-step", ber_args.snr_step);
  ber_cmd->add_option("--feedback", ber_args.feedback, "perfect or delayed");
  ber_cmd->add_option("--fd-tc", ber_args.fd_tc, "Normalized Doppler");
  ber_cmd->add_option("--delta", ber_args.delta, "Feedback delay");
  ber_cmd->add_option("--min-trials", ber_args.min_trials);
  ber_cmd->add_option("--min-errors", ber_args.min_bit_errors);
  ber_cmd->add_option("--max-trials", ber_args.max_trials);
  ber_cmd->add_option("--renormalize", ber_args.renormalize, "Unit column norm precoders");
  ber_cmd->add_flag("--dry-run", ber_args.dry_run, "Echo the parsed configuration and exit");
  add_common(ber_cmd, common, true);

  BoundArgs bd_args;
  auto* bd_cmd = app.add_subcommand("bound", "Chernoff PEP and union bound over an SNR grid");
  bd_cmd->set_help_flag("--help", "Print this help message and exit");
  bd_cmd->add_option("--snr-db", bd_args.snr_db, "Comma-separated SNR list in dB");
  bd_cmd->add_option("--h", bd_args.h, "Channel vector, comma separated (a, a+bj)");
  bd_cmd->add_option("--samples", bd_args.samples, "Average over this many sampled channels");
  bd_cmd->add_option("--n-entries", bd_args.n_entries, "Taps per sampled channel");
  bd_cmd->add_option("--q", bd_args.q);
  bd_cmd->add_option("--b", bd_args.b);
  bd_cmd->add_option("--theta-sq", bd_args.theta_sq, "Bound constant (default 1.6180)");
  add_common(bd_cmd, common, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*cb_cmd) return cmd_codebook(cb_args, common, out, err);
    if (*tb_cmd) return cmd_tables(tb_args, common, out);
    if (*ber_cmd) {
      return cmd_ber(ber_args, common, ber_cmd->count("--seed") > 0,
                     ber_cmd->count("--threads") > 0, out, err);
    }
    if (*bd_cmd) return cmd_bound(bd_args, common, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace ghcb::cli
