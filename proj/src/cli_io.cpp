#include "twistring/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "twistring/newton_solver.hpp"
#include "twistring/seed_factory.hpp"

namespace twistring {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view s, const char* what) {
  s = trim(s);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidArgument(std::string("cannot parse ") + what + " from '" + std::string(s) + "'");
  }
  return v;
}

long long to_integer(std::string_view s, const char* what) {
  s = trim(s);
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidArgument(std::string("cannot parse ") + what + " from '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::size_t site_number(std::string_view s, std::size_t n_sites) {
  const long long i = to_integer(s, "site number");
  if (i < 1 || static_cast<std::size_t>(i) > n_sites) {
    throw InvalidArgument("site " + std::to_string(i) + " outside 1.." + std::to_string(n_sites));
  }
  return static_cast<std::size_t>(i - 1);
}

ordered_json config_to_json(const LatticeConfig& c) {
  ordered_json couplings;
  if (c.couplings.is_uniform()) {
    couplings["kind"] = "uniform";
    couplings["k"] = c.couplings.at(0);
  } else {
    couplings["kind"] = c.couplings.is_per_edge() ? "per_edge" : "per_bond";
    couplings["k"] = c.couplings.expand(c.n_sites);
  }
  ordered_json j;
  j["n"] = c.n_sites;
  j["couplings"] = couplings;
  j["phi"] = c.twist;
  j["omega"] = c.omega;
  j["nonlinearity"] = c.nonlinearity == Nonlinearity::defocusing ? "defocusing" : "focusing";
  return j;
}

LatticeConfig config_from_json(const ordered_json& j) {
  LatticeConfig c;
  c.n_sites = j.at("n").get<std::size_t>();
  const auto& cp = j.at("couplings");
  const auto kind = cp.at("kind").get<std::string>();
  if (kind == "uniform") {
    c.couplings = CouplingProfile::uniform(cp.at("k").get<double>());
  } else if (kind == "per_edge") {
    c.couplings = CouplingProfile::per_edge(cp.at("k").get<std::vector<double>>());
  } else if (kind == "per_bond") {
    c.couplings = CouplingProfile::per_bond(cp.at("k").get<std::vector<double>>());
  } else {
    throw FormatError("unknown coupling kind '" + kind + "'");
  }
  c.twist = j.at("phi").get<double>();
  c.omega = j.at("omega").get<double>();
  const auto nl = j.at("nonlinearity").get<std::string>();
  if (nl == "defocusing") {
    c.nonlinearity = Nonlinearity::defocusing;
  } else if (nl == "focusing") {
    c.nonlinearity = Nonlinearity::focusing;
  } else {
    throw FormatError("unknown nonlinearity '" + nl + "'");
  }
  return c;
}

}  // namespace

std::string to_json(const SolutionFile& s) {
  ordered_json j;
  j["schema_version"] = s.schema_version;
  j["config"] = config_to_json(s.config);
  j["amplitudes"] = s.wave.amplitudes();
  j["phases"] = s.wave.phases();
  j["residual_norm"] = s.residual_norm;
  ordered_json prov;
  prov["seed"] = s.provenance.seed;
  prov["path"] = s.provenance.path;
  j["provenance"] = prov;
  return j.dump(2) + "\n";
}

SolutionFile solution_from_json(std::string_view text) {
  try {
    const auto j = ordered_json::parse(text);
    SolutionFile s;
    s.schema_version = j.at("schema_version").get<int>();
    if (s.schema_version != SolutionFile::current_schema) {
      throw FormatError("unsupported schema_version " + std::to_string(s.schema_version));
    }
    s.config = config_from_json(j.at("config"));
    s.config.validate();
    auto amps = j.at("amplitudes").get<std::vector<double>>();
    auto phases = j.at("phases").get<std::vector<double>>();
    if (amps.size() != s.config.n_sites || phases.size() != s.config.n_sites) {
      throw FormatError("amplitude/phase arrays do not match n");
    }
    s.wave = StandingWave(std::move(amps), std::move(phases));
    s.residual_norm = j.at("residual_norm").get<double>();
    const auto& prov = j.at("provenance");
    s.provenance.seed = prov.at("seed").get<std::string>();
    s.provenance.path = prov.at("path").get<std::vector<std::string>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed solution file: ") + e.what());
  } catch (const DimensionError& e) {
    throw FormatError(std::string("malformed solution file: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("malformed solution file: ") + e.what());
  }
}

void write_solution(const std::filesystem::path& path, const SolutionFile& s) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path.string() + " for writing");
  f << to_json(s);
  if (!f) throw FormatError("failed writing " + path.string());
}

SolutionFile read_solution(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return solution_from_json(ss.str());
}

void write_branch_csv(std::ostream& os, const Branch& b) {
  os << to_string(b.parameter) << ",l2_norm,converged\n";
  for (const auto& p : b.points) {
    os << num(p.param_value) << ',' << num(p.l2_norm) << ',' << (p.converged ? 1 : 0) << '\n';
  }
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
  os << "re,im\n";
  for (const auto& l : s.eigenvalues) os << num(l.real()) << ',' << num(l.imag()) << '\n';
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  const std::size_t n = t.states.empty() ? 0 : t.states.front().size();
  os << "z";
  for (std::size_t i = 1; i <= n; ++i) os << ",abs_c" << i;
  os << ",H,P,P_conserved\n";
  for (std::size_t s = 0; s < t.size(); ++s) {
    os << num(t.z_samples[s]);
    for (const auto& c : t.states[s].values) os << ',' << num(std::abs(c));
    os << ',' << num(t.hamiltonian[s]) << ',' << num(t.power[s]) << ',' << num(t.conserved_power[s]) << '\n';
  }
}

void write_scan_csv(std::ostream& os, std::span<const PhiScanRow> rows) {
  os << "k,phi,min_node,min_amplitude,converged\n";
  for (const auto& r : rows) {
    os << num(r.k) << ',' << num(r.phi) << ',' << (r.converged ? std::to_string(r.min_node + 1) : std::string("0"))
       << ',' << num(r.min_amplitude) << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

void write_k0_csv(std::ostream& os, const K0Sweep& sweep) {
  os << "n,omega,k0\n";
  for (const auto& r : sweep.rows) os << r.n_sites << ',' << num(r.omega) << ',' << num(r.k0) << '\n';
}

double parse_phi(std::string_view text, std::size_t n_sites) {
  const std::string_view t = trim(text);
  const auto pi_pos = t.find("pi");
  if (pi_pos == std::string_view::npos) return to_double(t, "phi");

  double numerator = 1.0;
  if (pi_pos > 0) {
    std::string_view coef = trim(t.substr(0, pi_pos));
    if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
    numerator = to_double(coef, "phi coefficient");
  }
  std::string_view rest = trim(t.substr(pi_pos + 2));
  if (rest.empty()) return numerator * std::numbers::pi;
  if (rest.front() != '/') throw InvalidArgument("cannot parse phi from '" + std::string(t) + "'");
  rest = trim(rest.substr(1));
  double denom = 0.0;
  if (rest == "N" || rest == "n") {
    if (n_sites == 0) throw InvalidArgument("phi = pi/N needs the ring size");
    denom = static_cast<double>(n_sites);
  } else {
    denom = to_double(rest, "phi denominator");
  }
  if (denom == 0.0) throw InvalidArgument("phi denominator is zero");
  return numerator * std::numbers::pi / denom;
}

SeedSpec parse_seed(std::string_view text, std::size_t n_sites) {
  const std::string_view t = trim(text);
  const auto colon = t.find(':');
  if (colon == std::string_view::npos) throw InvalidArgument("seed must look like kind:site, got '" + std::string(t) + "'");
  const std::string_view kind = t.substr(0, colon);
  const std::string_view arg = t.substr(colon + 1);
  SeedSpec s;
  s.text = std::string(t);
  if (kind == "single") {
    s.excited = {site_number(arg, n_sites)};
  } else if (kind == "adjacent") {
    const std::size_t i = site_number(arg, n_sites);
    s.excited = {i, (i + 1) % n_sites};
  } else if (kind == "double") {
    const auto parts = split(arg, ',');
    if (parts.size() != 2) throw InvalidArgument("double seed needs two sites");
    s.excited = {site_number(parts[0], n_sites), site_number(parts[1], n_sites)};
    if (s.excited[0] == s.excited[1]) throw InvalidArgument("double seed sites must differ");
  } else {
    throw InvalidArgument("unknown seed kind '" + std::string(kind) + "'");
  }
  return s;
}

std::vector<double> parse_range(std::string_view text) {
  const auto parts = split(trim(text), ':');
  if (parts.size() != 3) throw InvalidArgument("range must look like a:step:b");
  const double a = to_double(parts[0], "range start");
  const double step = to_double(parts[1], "range step");
  const double b = to_double(parts[2], "range stop");
  if (!(step > 0.0) || b < a) throw InvalidArgument("range needs step > 0 and stop >= start");
  const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
  return out;
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  for (auto p : split(trim(text), ',')) out.push_back(to_double(p, "list entry"));
  return out;
}

PerturbSpec parse_perturb(std::string_view text, std::size_t n_sites) {
  PerturbSpec p;
  bool have_node = false, have_amp = false;
  for (auto field : split(trim(text), ',')) {
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) throw InvalidArgument("perturbation must look like node=i,amp=d");
    const auto key = trim(field.substr(0, eq));
    const auto value = field.substr(eq + 1);
    if (key == "node") {
      p.node = site_number(value, n_sites);
      have_node = true;
    } else if (key == "amp") {
      p.amplitude = to_double(value, "perturbation amplitude");
      have_amp = true;
    } else {
      throw InvalidArgument("unknown perturbation key '" + std::string(key) + "'");
    }
  }
  if (!have_node || !have_amp) throw InvalidArgument("perturbation needs node= and amp=");
  return p;
}

unsigned threads_from_env() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("TWISTRING_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  const long long v = to_integer(env, "TWISTRING_THREADS");
  if (v < 1) throw InvalidArgument("TWISTRING_THREADS must be a positive integer");
  return static_cast<unsigned>(std::min<long long>(v, 1024));
}

// ---------------------------------------------------------------------------
// Command-line front end

namespace {

constexpr int exit_ok = 0;
constexpr int exit_nonconverged = 1;
constexpr int exit_usage = 2;
constexpr int exit_diverged = 3;

struct SolveArgs {
  std::size_t n = 0;
  double omega = 1.0;
  std::optional<double> k;
  std::string k_list;
  std::string convention = "site";
  std::string phi = "0";
  std::string seed = "single:1";
  std::string out;
  std::string method = "continuation";
  std::string nonlinearity = "defocusing";
  std::string branch_out;
  double ds = 1e-2;
};

struct SpectrumArgs {
  std::string solution;
  std::string out_dir;
  double zero_tol = 1e-8;
};

struct EvolveArgs {
  std::string solution;
  double z_max = 50.0;
  double dz = 1e-3;
  std::size_t stride = 0;
  std::string perturb;
  std::optional<double> k;
  std::string out_dir;
};

struct SweepArgs {
  std::optional<std::size_t> n;
  std::string n_range;
  std::optional<double> omega;
  std::string omega_range;
  double norm_floor = 1e-3;
  double k_tol = 1e-6;
  std::string out_dir;
};

struct ScanArgs {
  std::size_t n = 0;
  double omega = 1.0;
  std::string k_values = "0.1,0.25,0.4";
  std::size_t phi_count = 40;
  std::string phi_range;
  std::string seed = "single:1";
  std::string out_dir;
};

// CSV goes to <dir>/<name> when a directory was given, else to `fallback`.
template <typename Fn>
void emit_csv(const std::string& dir, const char* name, std::ostream& fallback, Fn&& write) {
  if (dir.empty()) {
    write(fallback);
    return;
  }
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path.string() + " for writing");
  write(f);
}

std::string leg_note(const Branch& b) {
  if (b.points.empty()) return to_string(b.parameter);
  return std::string(to_string(b.parameter)) + " " + num(b.points.front().param_value) + " -> " +
         num(b.points.back().param_value);
}

void write_sidecar(const std::string& out, const Branch& b, std::ostream& err) {
  const std::string path = out + ".branch.csv";
  std::ofstream f(path, std::ios::binary);
  if (f) {
    write_branch_csv(f, b);
    err << "truncated branch written to " << path << '\n';
  }
}

void report_wave(std::ostream& out, const StandingWave& sw, double res) {
  out << "residual_norm " << num(res) << '\n';
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < sw.size(); ++i) {
    const double inten = sw.amplitude(i) * sw.amplitude(i);
    lo = std::min(lo, inten);
    hi = std::max(hi, inten);
    out << "node " << i + 1 << " amplitude " << num(sw.amplitude(i)) << " phase " << num(sw.phase(i)) << '\n';
  }
  out << "min_intensity " << num(lo) << '\n' << "max_intensity " << num(hi) << '\n';
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  LatticeConfig cfg;
  cfg.n_sites = a.n;
  cfg.omega = a.omega;
  if (a.nonlinearity == "focusing") {
    cfg.nonlinearity = Nonlinearity::focusing;
  } else if (a.nonlinearity != "defocusing") {
    throw InvalidArgument("nonlinearity must be defocusing or focusing");
  }
  if (a.k.has_value() == !a.k_list.empty()) throw InvalidArgument("give exactly one of --k and --k-list");
  if (a.k) {
    cfg.couplings = CouplingProfile::uniform(*a.k);
  } else {
    if (a.convention == "site") {
      cfg.couplings = CouplingProfile::per_edge(parse_list(a.k_list));
    } else if (a.convention == "bond") {
      cfg.couplings = CouplingProfile::per_bond(parse_list(a.k_list));
    } else {
      throw InvalidArgument("coupling convention must be site or bond");
    }
  }
  cfg.twist = parse_phi(a.phi, a.n);
  cfg.validate();

  ContinuationOptions opts;
  opts.ds = a.ds;

  SolutionFile file;
  file.config = cfg;

  if (a.method == "reduced") {
    if (!cfg.couplings.is_uniform()) throw InvalidArgument("the reduced method needs a uniform --k");
    const ReducedAmplitudes seed = reduced_ac_seed(cfg.n_sites, cfg.omega);
    const Branch b = continue_reduced(seed, cfg.omega, 0.0, cfg.couplings.at(0), opts);
    if (!a.branch_out.empty()) {
      std::ofstream f(a.branch_out, std::ios::binary);
      write_branch_csv(f, b);
    }
    if (b.truncated || !b.points.back().converged) {
      err << "reduced continuation did not reach k: " << b.note << '\n';
      write_sidecar(a.out, b, err);
      return exit_nonconverged;
    }
    file.wave = reconstruct(std::get<ReducedAmplitudes>(b.points.back().solution), cfg);
    file.provenance.seed = "reduced";
    file.provenance.path = {"reduced " + leg_note(b)};
  } else if (a.method == "continuation") {
    const SeedSpec seed = parse_seed(a.seed, cfg.n_sites);
    const TraceResult tr = trace_from_ac(cfg, seed.excited, {}, opts);
    if (!a.branch_out.empty()) {
      std::ofstream f(a.branch_out, std::ios::binary);
      write_branch_csv(f, tr.coupling_leg);
      if (!tr.twist_leg.points.empty()) write_branch_csv(f, tr.twist_leg);
    }
    if (!tr.complete) {
      const Branch& failed = tr.twist_leg.points.empty() ? tr.coupling_leg : tr.twist_leg;
      err << "continuation did not reach the target: " << failed.note << '\n';
      write_sidecar(a.out, failed, err);
      return exit_nonconverged;
    }
    file.wave = tr.endpoint;
    file.provenance.seed = seed.text;
    file.provenance.path = {leg_note(tr.coupling_leg), leg_note(tr.twist_leg)};
  } else {
    throw InvalidArgument("method must be continuation or reduced");
  }

  file.residual_norm = residual(file.wave, cfg).lpNorm<Eigen::Infinity>();
  write_solution(a.out, file);
  report_wave(out, file.wave, file.residual_norm);
  return exit_ok;
}

int cmd_spectrum(const SpectrumArgs& a, std::ostream& out, std::ostream& err) {
  const SolutionFile s = read_solution(a.solution);
  const Spectrum spec = spectrum_of(s.wave, s.config, a.zero_tol);
  emit_csv(a.out_dir, "spectrum.csv", out, [&](std::ostream& os) { write_spectrum_csv(os, spec); });
  std::ostream& log = a.out_dir.empty() ? err : out;
  log << "eigenvalues " << spec.eigenvalues.size() << '\n'
      << "max_real_part " << num(spec.max_real_part) << '\n'
      << "kernel_eigenvalues " << spec.kernel_algebraic_multiplicity << '\n'
      << "classification " << to_string(spec.classification) << '\n';
  return exit_ok;
}

int cmd_evolve(const EvolveArgs& a, std::ostream& out, std::ostream& err) {
  const SolutionFile s = read_solution(a.solution);
  LatticeConfig cfg = s.config;
  if (a.k) cfg = cfg.with_couplings(CouplingProfile::uniform(*a.k));
  const ComplexState reference = to_complex(s.wave, 0.0, s.config);
  ComplexState c0 = reference;
  if (!a.perturb.empty()) {
    const PerturbSpec p = parse_perturb(a.perturb, cfg.n_sites);
    c0 = perturb_amplitude(s.wave, p.node, p.amplitude, s.config);
  }
  const Trajectory t = evolve(c0, cfg, a.z_max, a.dz, a.stride);
  emit_csv(a.out_dir, "trajectory.csv", out, [&](std::ostream& os) { write_trajectory_csv(os, t); });

  std::ostream& log = a.out_dir.empty() ? err : out;
  if (t.diverged) {
    log << "evolution diverged at z = " << num(t.z_samples.back()) << '\n';
    return exit_diverged;
  }
  const BoundednessReport r = boundedness_report(t, reference);
  log << "samples " << t.size() << '\n'
      << "max_deviation " << num(r.max_deviation_overall) << '\n'
      << "initial_deviation " << num(r.initial_deviation) << '\n'
      << "bounded " << (r.bounded ? "yes" : "no") << '\n'
      << "power_drift " << num(t.power_drift()) << '\n'
      << "conserved_power_drift " << num(t.conserved_power_drift()) << '\n';
  if (!cfg.couplings.is_per_edge()) log << "hamiltonian_drift " << num(t.hamiltonian_drift()) << '\n';
  return exit_ok;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  K0Options opts;
  opts.norm_floor = a.norm_floor;
  opts.k_tol = a.k_tol;
  const unsigned threads = threads_from_env();
  if (a.n.has_value() == !a.n_range.empty()) throw InvalidArgument("give exactly one of --n and --n-range");
  if (a.omega.has_value() == !a.omega_range.empty()) {
    throw InvalidArgument("give exactly one of --omega and --omega-range");
  }

  K0Sweep sweep;
  if (!a.omega_range.empty()) {
    if (!a.n) throw InvalidArgument("an omega sweep needs a single --n");
    const auto omegas = parse_range(a.omega_range);
    sweep = sweep_k0_over_omega(*a.n, omegas, opts, threads);
  } else {
    std::vector<std::size_t> ns;
    if (a.n) {
      ns.push_back(*a.n);
    } else {
      for (double x : parse_range(a.n_range)) ns.push_back(static_cast<std::size_t>(std::llround(x)));
    }
    sweep = sweep_k0_over_n(ns, *a.omega, opts, threads);
  }
  emit_csv(a.out_dir, "k0.csv", out, [&](std::ostream& os) { write_k0_csv(os, sweep); });
  std::ostream& log = a.out_dir.empty() ? err : out;
  if (sweep.fit) log << "slope " << num(sweep.fit->slope) << '\n' << "intercept " << num(sweep.fit->intercept) << '\n';
  return exit_ok;
}

int cmd_scan(const ScanArgs& a, std::ostream& out, std::ostream& err) {
  LatticeConfig base;
  base.n_sites = a.n;
  base.omega = a.omega;
  base.validate();
  const auto ks = parse_list(a.k_values);
  std::vector<double> phis;
  if (!a.phi_range.empty()) {
    phis = parse_range(a.phi_range);
  } else {
    if (a.phi_count == 0) throw InvalidArgument("--phi-count must be positive");
    const double top = 2.0 * std::numbers::pi / static_cast<double>(a.n);
    for (std::size_t j = 1; j <= a.phi_count; ++j) {
      phis.push_back(top * static_cast<double>(j) / static_cast<double>(a.phi_count + 1));
    }
  }
  const SeedSpec seed = parse_seed(a.seed, a.n);
  const auto rows = scan_min_node_vs_phi(base, ks, phis, seed.excited, {}, threads_from_env());
  emit_csv(a.out_dir, "scan.csv", out, [&](std::ostream& os) { write_scan_csv(os, rows); });

  std::ostream& log = a.out_dir.empty() ? err : out;
  for (double k : ks) {
    double lo = std::numeric_limits<double>::infinity();
    std::size_t gaps = 0;
    for (const auto& r : rows) {
      if (r.k != k) continue;
      if (r.converged) {
        lo = std::min(lo, r.min_amplitude);
      } else {
        ++gaps;
      }
    }
    log << "k " << num(k) << " min_amplitude " << num(lo) << " gaps " << gaps << '\n';
  }
  return exit_ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Standing waves of the twisted multicore-fiber ring", "twistring"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "continue a standing wave from the anti-continuum limit");
  s->add_option("--n", solve.n, "number of cores")->required()->check(CLI::PositiveNumber);
  s->add_option("--omega", solve.omega, "propagation constant");
  s->add_option("--k", solve.k, "uniform coupling");
  s->add_option("--k-list", solve.k_list, "per-site couplings, comma separated");
  s->add_option("--k-convention", solve.convention,
                 "site: k_n multiplies c_n in both neighbours' equations; bond: k_n couples sites n and n+1");
  s->add_option("--phi", solve.phi, "twist phase: number, pi/N or pi/<int>");
  s->add_option("--seed", solve.seed, "single:i | adjacent:i | double:i,j (1-based)");
  s->add_option("--out", solve.out, "solution JSON path")->required();
  s->add_option("--method", solve.method, "continuation | reduced");
  s->add_option("--nonlinearity", solve.nonlinearity, "defocusing | focusing");
  s->add_option("--branch-out", solve.branch_out, "optional CSV of the continuation branch");
  s->add_option("--ds", solve.ds, "continuation step");

  SpectrumArgs spectrum;
  auto* sp = app.add_subcommand("spectrum", "eigenvalues of the linearization about a solution");
  sp->add_option("--solution", spectrum.solution, "solution JSON")->required();
  sp->add_option("--out-dir", spectrum.out_dir, "write spectrum.csv here instead of stdout");
  sp->add_option("--zero-tol", spectrum.zero_tol, "threshold for zero eigenvalues");

  EvolveArgs evolve_args;
  auto* ev = app.add_subcommand("evolve", "RK4 propagation of a (perturbed) solution");
  ev->add_option("--solution", evolve_args.solution, "solution JSON")->required();
  ev->add_option("--z-max", evolve_args.z_max, "propagation length");
  ev->add_option("--dz", evolve_args.dz, "RK4 step");
  ev->add_option("--stride", evolve_args.stride, "record every stride steps (0: about 2000 samples)");
  ev->add_option("--perturb", evolve_args.perturb, "node=i,amp=d (1-based node)");
  ev->add_option("--k", evolve_args.k, "evolve under this uniform coupling instead");
  ev->add_option("--out-dir", evolve_args.out_dir, "write trajectory.csv here instead of stdout");

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep-k0", "critical coupling of the dark-node branch");
  sw->add_option("--n", sweep.n, "ring size (even)");
  sw->add_option("--n-range", sweep.n_range, "a:step:b");
  sw->add_option("--omega", sweep.omega, "propagation constant");
  sw->add_option("--omega-range", sweep.omega_range, "a:step:b");
  sw->add_option("--norm-floor", sweep.norm_floor, "l2 norm treated as collapsed");
  sw->add_option("--k-tol", sweep.k_tol, "bisection tolerance");
  sw->add_option("--out-dir", sweep.out_dir, "write k0.csv here instead of stdout");

  ScanArgs scan;
  auto* sc = app.add_subcommand("scan-phi", "weakest node against twist");
  sc->add_option("--n", scan.n, "number of cores")->required()->check(CLI::PositiveNumber);
  sc->add_option("--omega", scan.omega, "propagation constant");
  sc->add_option("--k-values", scan.k_values, "couplings, comma separated");
  sc->add_option("--phi-count", scan.phi_count, "interior points of (0, 2pi/N)");
  sc->add_option("--phi-range", scan.phi_range, "a:step:b instead of --phi-count");
  sc->add_option("--seed", scan.seed, "single:i | adjacent:i | double:i,j (1-based)");
  sc->add_option("--out-dir", scan.out_dir, "write scan.csv here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return exit_usage;
  }

  try {
    if (s->parsed()) return cmd_solve(solve, out, err);
    if (sp->parsed()) return cmd_spectrum(spectrum, out, err);
    if (ev->parsed()) return cmd_evolve(evolve_args, out, err);
    if (sw->parsed()) return cmd_sweep(sweep, out, err);
    if (sc->parsed()) return cmd_scan(scan, out, err);
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const UnsupportedConfiguration& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const SingularJacobian& e) {
    err << "error: " << e.what() << '\n';
    return exit_nonconverged;
  }
  return exit_usage;
}

}  // namespace twistring
