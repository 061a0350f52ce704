#pragma once

// Branch tracing in the coupling and twist parameters, starting from the
// anti-continuum limit, plus the critical-coupling (k0) search on the
// dark-node reduction.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "twistring/lattice_model.hpp"
#include "twistring/newton_solver.hpp"
#include "twistring/seed_factory.hpp"

namespace twistring {

enum class ContinuationParameter {
  coupling_k,      // uniform coupling k
  coupling_scale,  // factor s applied to the configured coupling profile
  twist_phi,
};

const char* to_string(ContinuationParameter p) noexcept;

struct BranchPoint {
  double param_value = 0.0;
  std::variant<StandingWave, ReducedAmplitudes> solution;
  double l2_norm = 0.0;
  bool converged = false;
  /// Max-norm of the residual of the system this point solves.
  double residual_norm = 0.0;
};

struct Branch {
  ContinuationParameter parameter = ContinuationParameter::coupling_k;
  /// Configuration with the continuation parameter at its start value.
  LatticeConfig config;
  std::vector<BranchPoint> points;
  bool truncated = false;
  std::string note;
};

struct ContinuationOptions {
  double ds = 1e-2;
  int max_halvings = 6;
  NewtonOptions newton;

  void validate() const;
};

double l2_norm(const StandingWave& sw);
double l2_norm_reduced(const ReducedAmplitudes& a);

/// `base` with the continuation parameter set to `value`. For coupling_scale
/// the profile of `base` is the s = 1 profile.
LatticeConfig with_parameter(const LatticeConfig& base, ContinuationParameter p, double value);

/// Natural-parameter continuation from `from` to `to`. `start` seeds the first
/// solve at `from`; every later point is seeded by its predecessor. Failed
/// steps are halved up to max_halvings times; after that the branch is
/// returned truncated. A solve that lands on the zero state (norm below 1e-6
/// of the start) counts as a failed step.
Branch continue_natural(const StandingWave& start, const LatticeConfig& base, ContinuationParameter p, double from,
                        double to, const ContinuationOptions& opts = {});

/// Natural continuation of a dark-node reduction in k, with the same
/// step control and collapse rule.
Branch continue_reduced(const ReducedAmplitudes& start, double omega, double k_from, double k_to,
                        const ContinuationOptions& opts = {});

struct ArclengthOptions {
  double ds = 1e-2;
  double ds_min = 1e-6;
  int max_steps = 2000;
  NewtonOptions newton;
};

/// Pseudo-arclength continuation of a dark-node reduction in k. Runs from
/// `start` (a solution at k_start) until k exceeds k_stop, the l2 norm drops
/// below norm_floor, or max_steps is reached.
Branch continue_reduced_arclength(const ReducedAmplitudes& start, double omega, double k_start, double k_stop,
                                  double norm_floor, const ArclengthOptions& opts = {});

/// Result of tracing from the anti-continuum limit: first in the coupling at
/// zero twist, then in the twist at the target coupling.
struct TraceResult {
  Branch coupling_leg;
  Branch twist_leg;
  StandingWave endpoint;
  bool complete = false;
};

TraceResult trace_from_ac(const LatticeConfig& target, std::span<const std::size_t> excited,
                          std::span<const int> signs = {}, const ContinuationOptions& opts = {});

struct PhiScanRow {
  double k = 0.0;
  double phi = 0.0;
  std::size_t min_node = 0;  // 0-based site with the smallest |a|
  double min_amplitude = 0.0;  // |a| at that site, NaN for a gap
  bool converged = false;
};

/// For every k: trace from the anti-continuum seed to (k, phi = 0), then walk
/// the ascending phi grid and record the weakest node.
std::vector<PhiScanRow> scan_min_node_vs_phi(const LatticeConfig& base, std::span<const double> ks,
                                             std::span<const double> phis, std::span<const std::size_t> excited,
                                             const ContinuationOptions& opts = {}, unsigned threads = 1);

struct K0Options {
  double ds = 1e-2;
  double norm_floor = 1e-3;
  double k_tol = 1e-6;
  int max_halvings = 6;
  NewtonOptions newton;
};

struct K0Result {
  double k0 = 0.0;       // first coupling where the branch has collapsed
  double k_lower = 0.0;  // last coupling with a nontrivial solution
  Branch branch;         // reduced branch from k = 0, ending with the collapsed point
  bool used_arclength = false;
};

/// Continues the dark-node reduction of an N-site ring in k until its l2 norm
/// falls below norm_floor, then bisects the bracket down to k_tol.
K0Result detect_k0(std::size_t n_sites, double omega, const K0Options& opts = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LinearFit least_squares_line(std::span<const double> x, std::span<const double> y);

struct K0Row {
  std::size_t n_sites = 0;
  double omega = 0.0;
  double k0 = 0.0;
};

struct K0Sweep {
  std::vector<K0Row> rows;
  std::optional<LinearFit> fit;  // k0 against omega; only for omega sweeps of two or more values
};

K0Sweep sweep_k0_over_n(std::span<const std::size_t> ns, double omega, const K0Options& opts = {},
                        unsigned threads = 1);
K0Sweep sweep_k0_over_omega(std::size_t n_sites, std::span<const double> omegas, const K0Options& opts = {},
                            unsigned threads = 1);

}  // namespace twistring
