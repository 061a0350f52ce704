// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "twistring/cli_io.hpp"
#include "twistring/continuation.hpp"
#include "twistring/evolution.hpp"
#include "twistring/seed_factory.hpp"
#include "twistring/stability.hpp"

using namespace twistring;
using std::numbers::pi;

namespace {

LatticeConfig ring(std::size_t n, double k, double phi, double omega = 1.0) {
  LatticeConfig c;
  c.n_sites = n;
  c.couplings = CouplingProfile::uniform(k);
  c.twist = phi;
  c.omega = omega;
  return c;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

double max_residual(const StandingWave& sw, const LatticeConfig& cfg) {
  return residual(sw, cfg).lpNorm<Eigen::Infinity>();
}

double asymmetry(const StandingWave& sw) {
  const auto d = symmetry_defect(sw);
  return std::max(d.amplitude, d.phase);
}

ReducedAmplitudes reduced_at(std::size_t n, double k, double omega = 1.0) {
  const Branch b = continue_reduced(reduced_ac_seed(n, omega), omega, 0.0, k);
  if (b.truncated || b.points.empty()) throw Error("reduced continuation failed: " + b.note);
  return std::get<ReducedAmplitudes>(b.points.back().solution);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Spectrum checks shared by criteria 5 and 12.
bool spectrum_ok(const Spectrum& s, double k, double omega, std::string& why) {
  std::string off_band;
  for (auto l : s.eigenvalues) {
    if (std::abs(l) <= 1e-8) continue;
    const double w = std::abs(l.imag());
    if (std::abs(l.real()) <= 1e-8 && w >= omega - 2 * k - 1e-6 && w <= omega + 2 * k + 1e-6) continue;
    if (l.imag() >= 0) off_band += " " + fmt(l.real()) + "+" + fmt(l.imag()) + "i";
  }
  why = "maxRe " + fmt(s.max_real_part) + " kernel " + std::to_string(s.kernel_algebraic_multiplicity) +
        (off_band.empty() ? " in band" : " outside band:" + off_band + " (and conjugates)");
  return s.max_real_part <= 1e-8 && s.kernel_algebraic_multiplicity == 2 && off_band.empty();
}

// Solutions produced by criteria 1-3, re-checked by criterion 4.
std::vector<std::pair<std::string, StandingWave>> continued;

Outcome criterion1() {
  const std::size_t one[] = {0};
  const auto cfg = ring(6, 0.25, pi / 6);
  const auto t = trace_from_ac(cfg, one);
  if (!t.complete) return {false, "trace incomplete"};
  continued.emplace_back("N6 pi/6", t.endpoint);
  const double a4 = std::abs(t.endpoint.amplitude(3));
  const double res = max_residual(t.endpoint, cfg);
  Outcome o{a4 <= 1e-10 && res <= 1e-10, "|a4| " + fmt(a4) + " res " + fmt(res)};
  for (double dphi : {-0.1, 0.1}) {
    const auto c = ring(6, 0.25, pi / 6 + dphi);
    const auto off = trace_from_ac(c, one);
    const double a = std::abs(off.endpoint.amplitude(3));
    o.pass = o.pass && off.complete && a > 1e-3;
    o.detail += " |a4(pi/6" + std::string(dphi < 0 ? "-" : "+") + "0.1)| " + fmt(a);
    continued.emplace_back("N6 off", off.endpoint);
  }
  return o;
}

Outcome criterion2() {
  const std::size_t one[] = {0};
  const double ks[] = {0.1, 0.25, 0.4};
  std::vector<double> phis;
  for (int j = 1; j <= 40; ++j) phis.push_back(j * (2 * pi / 7) / 41);
  const auto rows = scan_min_node_vs_phi(ring(7, 0.0, 0.0), ks, phis, one, {}, threads_from_env());
  Outcome o{true, ""};
  for (double k : ks) {
    double lo = INFINITY, at_phi = 0;
    std::size_t node = 0;
    bool all = true;
    for (const auto& r : rows) {
      if (r.k != k) continue;
      all = all && r.converged;
      if (r.min_amplitude < lo) {
        lo = r.min_amplitude;
        at_phi = r.phi;
        node = r.min_node;
      }
    }
    o.pass = o.pass && all && lo > 1e-3;
    o.detail += "k " + fmt(k) + ": min " + fmt(lo) + " (node " + std::to_string(node + 1) + ", phi " + fmt(at_phi) +
                (all ? ")" : ", gaps)") + "; ";
  }
  // the same grid, continued in phi, for the symmetry check
  for (double k : ks) {
    const auto t = trace_from_ac(ring(7, k, 0.0), one);
    StandingWave sw = t.endpoint;
    double prev = 0.0;
    for (double phi : phis) {
      const Branch b = continue_natural(sw, ring(7, k, 0.0), ContinuationParameter::twist_phi, prev, phi);
      if (b.truncated) break;
      sw = std::get<StandingWave>(b.points.back().solution);
      prev = phi;
      continued.emplace_back("N7 scan", sw);
    }
  }
  return o;
}

Outcome criterion3() {
  const auto cfg = ring(7, 0.25, pi / 7);
  const StandingWave sw = reconstruct_odd(reduced_at(7, 0.25), cfg);
  continued.emplace_back("N7 pi/7", sw);
  const double a1 = sw.amplitude(0);
  const double pair = std::abs(sw.amplitude(3) - sw.amplitude(4));
  const double res = max_residual(sw, cfg);
  return {a1 == 0.0 && pair <= 1e-12 && res <= 1e-10,
          "a1 " + fmt(a1) + " |a4-a5| " + fmt(pair) + " res " + fmt(res)};
}

Outcome criterion4() {
  double worst = 0;
  std::string where;
  for (const auto& [name, sw] : continued) {
    const double d = asymmetry(sw);
    if (d >= worst) {
      worst = d;
      where = name;
    }
  }
  return {!continued.empty() && worst <= 1e-10,
          std::to_string(continued.size()) + " solutions, worst defect " + fmt(worst) + " (" + where + ")"};
}

Outcome criterion5() {
  Outcome o{true, ""};
  struct Case {
    std::string name;
    StandingWave sw;
    LatticeConfig cfg;
  };
  std::vector<Case> cases;
  cases.push_back({"N6", reconstruct_even(reduced_at(6, 0.25), ring(6, 0.25, pi / 6)), ring(6, 0.25, pi / 6)});
  cases.push_back({"N7", reconstruct_odd(reduced_at(7, 0.25), ring(7, 0.25, pi / 7)), ring(7, 0.25, pi / 7)});
  cases.push_back({"N50", reconstruct_even(reduced_at(50, 0.25), ring(50, 0.25, pi / 50)), ring(50, 0.25, pi / 50)});
  for (const auto& c : cases) {
    std::string why;
    o.pass = spectrum_ok(spectrum_of(c.sw, c.cfg), 0.25, 1.0, why) && o.pass;
    o.detail += c.name + ": " + why + "; ";
  }
  return o;
}

Outcome criterion6() {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> nd(3, 64);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = nd(rng);
    const double k = 0.5 * u(rng), phi = 2 * pi / n * u(rng), omega = 0.5 + 1.5 * u(rng);
    const auto s = spectrum_of(StandingWave::zero(n), ring(n, k, phi, omega));
    std::vector<double> im;
    for (auto l : s.eigenvalues) {
      im.push_back(l.imag());
      worst = std::max(worst, std::abs(l.real()));
    }
    std::sort(im.begin(), im.end());
    const auto e = test::circulant_imaginary_parts(n, k, phi, omega);
    for (std::size_t i = 0; i < e.size(); ++i) worst = std::max(worst, std::abs(im[i] - e[i]));
  }
  return {worst <= 1e-8, "20 rings, worst deviation " + fmt(worst)};
}

Outcome criterion7() {
  const K0Result r = detect_k0(50, 1.0);
  const double omegas[] = {0.5, 1.0, 1.5, 2.0};
  const K0Sweep s = sweep_k0_over_omega(50, omegas, {}, threads_from_env());
  const double slope = s.fit ? s.fit->slope : NAN;
  std::ostringstream d;
  d.precision(7);
  d << "k0(50, 1) " << r.k0 << " slope " << slope << " intercept " << (s.fit ? s.fit->intercept : NAN);
  return {r.k0 >= 0.48 && r.k0 <= 0.52 && slope >= 0.45 && slope <= 0.55, d.str()};
}

Outcome criterion8() {
  const K0Result r = detect_k0(50, 1.0);
  const auto& pts = r.branch.points;
  const double at0 = pts.front().l2_norm;
  const double at_k0 = pts.back().l2_norm;
  const bool at_end = pts.back().param_value == r.k0;
  return {pts.front().param_value == 0.0 && at0 == 1.0 && at_end && at_k0 < 1e-3,
          "l2(0) " + fmt(at0) + " l2(k0) " + fmt(at_k0) + " over " + std::to_string(pts.size()) + " points"};
}

Outcome criterion9() {
  const auto cfg = ring(6, 0.25, pi / 6);
  const StandingWave sw = reconstruct_even(reduced_at(6, 0.25), cfg);
  const auto c0 = to_complex(sw, 0.0, cfg);
  const auto t = evolve(c0, cfg, 50.0, 1e-3);
  const auto r = boundedness_report(t, c0);
  const double h = t.hamiltonian_drift(), p = t.power_drift();
  return {!t.diverged && r.max_deviation_overall <= 1e-6 && h <= 1e-8 && p <= 1e-8,
          "max ||c|-|c0|| " + fmt(r.max_deviation_overall) + " H drift " + fmt(h) + " P drift " + fmt(p)};
}

Outcome criterion10() {
  Outcome o{true, ""};
  auto perturbed = [&](const std::string& name, const StandingWave& sw, const LatticeConfig& cfg, std::size_t node) {
    const auto t = evolve(perturb_amplitude(sw, node, 0.05, cfg), cfg, 200.0, 1e-3);
    const auto r = boundedness_report(t, to_complex(sw, 0.0, cfg));
    const bool ok = !t.diverged && r.bounded && !r.growth_trend &&
                    r.max_deviation_overall <= 5 * r.initial_deviation;
    o.pass = o.pass && ok;
    o.detail += name + ": dev " + fmt(r.max_deviation_overall) + "/" + fmt(r.initial_deviation) +
                (r.growth_trend ? " growth" : "") + "; ";
  };
  perturbed("N6 node4", reconstruct_even(reduced_at(6, 0.25), ring(6, 0.25, pi / 6)), ring(6, 0.25, pi / 6), 3);
  perturbed("N7 node1", reconstruct_odd(reduced_at(7, 0.25), ring(7, 0.25, pi / 7)), ring(7, 0.25, pi / 7), 0);

  const StandingWave sw = reconstruct_even(reduced_at(10, 0.45), ring(10, 0.45, pi / 10));
  for (double k : {0.35, 0.55}) {
    const auto cfg = ring(10, k, pi / 10);
    const auto c0 = to_complex(sw, 0.0, cfg);
    const auto t = evolve(c0, cfg, 200.0, 1e-3);
    const auto r = boundedness_report(t, c0);
    o.pass = o.pass && !t.diverged && r.bounded && !r.growth_trend;
    o.detail += "N10 at k " + fmt(k) + ": peak ratio " + fmt(r.peak_ratio) + (r.growth_trend ? " growth" : "") + "; ";
  }
  return o;
}

Outcome criterion11() {
  const std::size_t one[] = {0};
  const std::vector<double> k{0.4, 0.25, 0.25, 0.25, 0.25, 0.25};
  Outcome o;
  for (int bond = 0; bond < 2; ++bond) {
    LatticeConfig cfg = ring(6, 0.25, 0.25);
    cfg.couplings = bond ? CouplingProfile::per_bond(k) : CouplingProfile::per_edge(k);
    const auto t = trace_from_ac(cfg, one);
    if (!t.complete) {
      o.detail += bond ? "bond: trace incomplete" : "site: trace incomplete; ";
      continue;
    }
    const double asym = asymmetry(t.endpoint);
    const Spectrum s = spectrum_of(t.endpoint, cfg);
    const bool ok = asym > 1e-3 && s.max_real_part <= 1e-8;
    if (!bond) o.pass = ok;  // scored under the per-site convention
    o.detail += std::string(bond ? "[bond convention, informational] " : "site convention: ") + "asymmetry " +
                fmt(asym) + " maxRe " + fmt(s.max_real_part) + " res " + fmt(max_residual(t.endpoint, cfg)) +
                (bond ? "" : "; ");
  }
  return o;
}

Outcome criterion12() {
  const auto cfg = ring(12, 0.25, 2 * pi / 12);
  const StandingWave half = reconstruct_even(reduced_at(6, 0.25), ring(6, 0.25, pi / 6));
  const StandingWave spliced = splice_double_pulse(half, cfg);
  const std::size_t two[] = {0, 6};
  const auto t = trace_from_ac(cfg, two);
  if (!t.complete) return {false, "direct trace incomplete"};
  const double diff =
      test::max_field_distance(test::gauge_fixed_field(spliced), test::gauge_fixed_field(t.endpoint));
  std::string why;
  const bool stable = spectrum_ok(spectrum_of(spliced, cfg), 0.25, 1.0, why);
  return {diff <= 1e-8 && stable, "max node difference " + fmt(diff) + "; " + why};
}

Outcome criterion13() {
  Outcome o{true, ""};
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::size_t> size(3, 12);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  auto random_wave = [&](std::size_t n) {
    std::vector<double> a(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = 3 * u(rng) - 1.5;
      t[i] = 2 * pi * u(rng) - pi;
    }
    return StandingWave(a, t);
  };

  double jac = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = size(rng);
    const auto cfg = ring(n, 0.6 * u(rng), 2 * pi * u(rng), 0.5 + 1.5 * u(rng));
    const auto sw = random_wave(n);
    const Eigen::MatrixXd fd = test::fd_jacobian(sw, cfg);
    jac = std::max(jac, (jacobian(sw, cfg) - fd).norm() / fd.norm());
  }

  // residual: a solution stays a solution under rotation; flow: rhs and RK4 commute with rotation
  const auto cfg = ring(7, 0.25, 0.3);
  const auto sol = trace_from_ac(cfg, std::vector<std::size_t>{0}).endpoint;
  double gauge_res = 0, gauge_flow = 0;
  for (double theta : {0.3, 2.0, -1.1}) {
    const auto rot = from_complex(gauge_rotate(to_complex(sol, 0.0, cfg), theta));
    gauge_res = std::max(gauge_res, max_residual(rot, cfg));
    const auto c0 = to_complex(random_wave(7), 0.0, cfg);
    const auto a = evolve(gauge_rotate(c0, theta), cfg, 2.0, 1e-3).states.back();
    const auto b = gauge_rotate(evolve(c0, cfg, 2.0, 1e-3).states.back(), theta);
    for (std::size_t i = 0; i < 7; ++i) gauge_flow = std::max(gauge_flow, std::abs(a.values[i] - b.values[i]));
  }

  const auto c0 = to_complex(random_wave(5), 0.0, ring(5, 0.3, 0.4, 1.1));
  const auto rk_cfg = ring(5, 0.3, 0.4, 1.1);
  auto end = [&](double dz) { return evolve(c0, rk_cfg, 2.0, dz).states.back(); };
  const auto ref = end(0.02 / 8);
  auto err = [&](const ComplexState& s) {
    double e = 0;
    for (std::size_t i = 0; i < 5; ++i) e = std::max(e, std::abs(s.values[i] - ref.values[i]));
    return e;
  };
  const double factor = err(end(0.02)) / err(end(0.01));

  double lin = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = size(rng);
    const auto c = ring(n, 0.5 * u(rng), 2 * pi * u(rng), 0.5 + 1.5 * u(rng));
    const auto sw = random_wave(n);
    std::vector<Complex> field(n);
    for (std::size_t i = 0; i < n; ++i) field[i] = std::polar(1.0, sw.phase(i)) * sw.amplitude(i);
    const Eigen::MatrixXd fd = test::fd_linearization(field, c);
    lin = std::max(lin, (build_linearization(sw, c, false).to_double() - fd).norm() / fd.norm());
  }

  o.pass = jac <= 1e-6 && gauge_res <= 1e-10 && gauge_flow <= 1e-10 && factor >= 12 && factor <= 20 && lin <= 1e-6;
  o.detail = "jacobian " + fmt(jac) + " gauge residual " + fmt(gauge_res) + " gauge flow " + fmt(gauge_flow) +
             " RK4 factor " + fmt(factor) + " linearization " + fmt(lin);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double time_limit;  // seconds, 0 = none
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "dark node at phi = pi/N, even N", 5, criterion1},
      {2, "no dark node for odd N with one bright node", 60, criterion2},
      {3, "odd-N dark node reconstruction", 0, criterion3},
      {4, "reflection symmetry of continued solutions", 0, criterion4},
      {5, "spectral stability of dark-node states", 10, criterion5},
      {6, "zero-state spectrum vs plane waves", 0, criterion6},
      {7, "k0 scaling", 300, criterion7},
      {8, "bifurcation diagram end points", 0, criterion8},
      {9, "standing-wave evolution", 0, criterion9},
      {10, "bounded perturbed evolution", 0, criterion10},
      {11, "asymmetric coupling breaks symmetry, stays stable", 0, criterion11},
      {12, "double pulse splicing", 0, criterion12},
      {13, "property suites", 0, criterion13},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0 && secs > c.time_limit) {
      o.pass = false;
      o.detail += " [over time limit " + fmt(c.time_limit) + " s]";
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s criterion %2d  %-50s %7.2f s  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 13 criteria passed\n", 13 - failed);
  return failed;
}
