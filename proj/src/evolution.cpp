#include "twistring/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twistring/errors.hpp"

namespace twistring {

namespace {

double drift(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  const double ref = xs.front();
  double worst = 0.0;
  for (double x : xs) worst = std::max(worst, std::abs(x - ref));
  return ref != 0.0 ? worst / std::abs(ref) : worst;
}

bool all_finite(const std::vector<Complex>& v) {
  return std::all_of(v.begin(), v.end(), [](const Complex& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

}  // namespace

double Trajectory::hamiltonian_drift() const { return drift(hamiltonian); }
double Trajectory::power_drift() const { return drift(power); }
double Trajectory::conserved_power_drift() const { return drift(conserved_power); }

Trajectory evolve(const ComplexState& c0, const LatticeConfig& cfg, double z_max, double dz, std::size_t stride) {
  cfg.validate();
  if (c0.size() != cfg.n_sites) throw DimensionError("initial state length does not match lattice size");
  if (!(dz > 0.0) || !std::isfinite(dz)) throw InvalidArgument("dz must be positive");
  if (!(z_max >= dz) || !std::isfinite(z_max)) throw InvalidArgument("z_max must be at least dz");

  const auto n_steps = static_cast<std::size_t>(std::ceil(z_max / dz - 1e-9));
  const double h = z_max / static_cast<double>(n_steps);
  if (stride == 0) stride = std::max<std::size_t>(1, n_steps / 2000);

  const Hopping k = cfg.couplings.hopping(cfg.n_sites);
  const bool has_h = !cfg.couplings.is_per_edge();
  const std::size_t n = cfg.n_sites;

  Trajectory t;
  auto record = [&](double z, const std::vector<Complex>& c) {
    ComplexState s{c};
    t.z_samples.push_back(z);
    t.hamiltonian.push_back(has_h ? hamiltonian(s, cfg) : std::numeric_limits<double>::quiet_NaN());
    t.power.push_back(power(s));
    t.conserved_power.push_back(conserved_power(s, cfg));
    t.states.push_back(std::move(s));
  };

  std::vector<Complex> c = c0.values, tmp(n), k1(n), k2(n), k3(n), k4(n);
  record(0.0, c);
  for (std::size_t step = 1; step <= n_steps; ++step) {
    evolution_rhs(c, cfg, k, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = c[i] + 0.5 * h * k1[i];
    evolution_rhs(tmp, cfg, k, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = c[i] + 0.5 * h * k2[i];
    evolution_rhs(tmp, cfg, k, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = c[i] + h * k3[i];
    evolution_rhs(tmp, cfg, k, k4);
    for (std::size_t i = 0; i < n; ++i) c[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    if (!all_finite(c)) {
      t.diverged = true;
      break;
    }
    if (step % stride == 0 || step == n_steps) {
      record(step == n_steps ? z_max : static_cast<double>(step) * h, c);
    }
  }
  return t;
}

ComplexState perturb_amplitude(const StandingWave& sw, std::size_t node, double delta, const LatticeConfig& cfg) {
  if (node >= sw.size()) throw InvalidArgument("perturbed node out of range");
  std::vector<double> amps = sw.amplitudes();
  amps[node] += delta;
  return to_complex(StandingWave(std::move(amps), sw.phases()), 0.0, cfg);
}

BoundednessReport boundedness_report(const Trajectory& traj, const ComplexState& reference, double bound_factor) {
  BoundednessReport r;
  if (traj.states.empty()) return r;
  const std::size_t n = reference.size();
  if (traj.states.front().size() != n) throw DimensionError("reference length does not match trajectory");

  r.max_deviation.assign(n, 0.0);
  std::vector<double> overall(traj.size(), 0.0);
  double peak = 0.0, peak0 = 0.0;
  for (std::size_t s = 0; s < traj.size(); ++s) {
    const auto& c = traj.states[s].values;
    for (std::size_t i = 0; i < n; ++i) {
      const double mag = std::abs(c[i]);
      const double dev = std::abs(mag - std::abs(reference.values[i]));
      r.max_deviation[i] = std::max(r.max_deviation[i], dev);
      overall[s] = std::max(overall[s], dev);
      peak = std::max(peak, mag);
      if (s == 0) peak0 = std::max(peak0, mag);
    }
  }
  r.initial_deviation = overall.front();
  r.max_deviation_overall = *std::max_element(overall.begin(), overall.end());
  r.peak_ratio = peak0 > 0.0 ? peak / peak0 : (peak > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);

  constexpr std::size_t windows = 4;
  if (traj.size() >= windows) {
    const std::size_t len = traj.size() / windows;
    for (std::size_t w = 0; w < windows; ++w) {
      const auto begin = overall.begin() + static_cast<std::ptrdiff_t>(w * len);
      const auto end = w + 1 == windows ? overall.end() : begin + static_cast<std::ptrdiff_t>(len);
      r.window_maxima.push_back(*std::max_element(begin, end));
    }
    bool increasing = true;
    for (std::size_t w = 1; w < windows; ++w) increasing = increasing && r.window_maxima[w] > r.window_maxima[w - 1];
    // Integration noise grows steadily too; only trends above 1e-8 count.
    r.growth_trend = increasing && r.window_maxima.back() > 1.5 * r.window_maxima.front() &&
                     r.window_maxima.back() > 1e-8;
  }

  r.oscillation_period.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (const auto& s : traj.states) mean += std::abs(s.values[i]);
    mean /= static_cast<double>(traj.size());
    std::vector<double> crossings;
    for (std::size_t s = 1; s < traj.size(); ++s) {
      if (std::abs(traj.states[s - 1].values[i]) < mean && std::abs(traj.states[s].values[i]) >= mean) {
        crossings.push_back(traj.z_samples[s]);
      }
    }
    if (crossings.size() >= 2) {
      r.oscillation_period[i] = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
    }
  }

  const bool within = r.initial_deviation > 1e-12 ? r.max_deviation_overall <= bound_factor * r.initial_deviation
                                                : r.peak_ratio <= bound_factor;
  r.bounded = !r.growth_trend && within;
  return r;
}

}  // namespace twistring
