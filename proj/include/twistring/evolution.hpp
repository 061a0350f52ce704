#pragma once

// Classical RK4 propagation in z with conservation monitoring.

#include <cstddef>
#include <vector>

#include "twistring/lattice_model.hpp"

namespace twistring {

struct Trajectory {
  std::vector<double> z_samples;
  std::vector<ComplexState> states;
  std::vector<double> hamiltonian;      // NaN for per-site couplings
  std::vector<double> power;
  std::vector<double> conserved_power;  // see conserved_power()
  bool diverged = false;

  std::size_t size() const noexcept { return z_samples.size(); }
  /// Largest |X(z) - X(0)| / |X(0)| over the samples (absolute when X(0) = 0).
  double hamiltonian_drift() const;
  double power_drift() const;
  double conserved_power_drift() const;
};

/// stride = 0 picks a stride that records about 2000 samples.
constexpr std::size_t default_stride = 0;

/// Integrates from z = 0 to z_max with a step of at most dz, shortened so the
/// last step lands on z_max exactly. Samples every `stride` steps plus the
/// final one. A non-finite state ends the run early with `diverged` set.
Trajectory evolve(const ComplexState& c0, const LatticeConfig& cfg, double z_max, double dz = 1e-3,
                  std::size_t stride = default_stride);

/// z = 0 field of `sw` with a_node replaced by a_node + delta.
ComplexState perturb_amplitude(const StandingWave& sw, std::size_t node, double delta, const LatticeConfig& cfg);

struct BoundednessReport {
  std::vector<double> max_deviation;  // per node, max_z ||c_n(z)| - |ref_n||
  double max_deviation_overall = 0.0;
  double initial_deviation = 0.0;     // max_n ||c_n(0)| - |ref_n||
  /// max_z max_n |c_n(z)| over max_n |c_n(0)|; the yardstick when the run
  /// starts on the reference but evolves under different parameters.
  double peak_ratio = 0.0;
  /// Maxima of the overall deviation in four consecutive windows.
  std::vector<double> window_maxima;
  bool growth_trend = false;
  /// Mean spacing of upward crossings of the mean, per node (NaN when
  /// fewer than two crossings). Informational.
  std::vector<double> oscillation_period;
  bool bounded = false;
};

/// `bounded` holds when there is no growth trend (window maxima strictly
/// increasing with the last above 1.5x the first and above 1e-8) and the deviation stays
/// within bound_factor x the initial deviation. When the trajectory starts
/// on the reference, peak_ratio <= bound_factor is used instead.
BoundednessReport boundedness_report(const Trajectory& traj, const ComplexState& reference, double bound_factor = 5.0);

}  // namespace twistring
