#pragma once

#include <vector>

#include "twistring/lattice_model.hpp"
#include "twistring/seed_factory.hpp"

namespace twistring {

struct NewtonOptions {
  double tol_residual = 1e-12;  // on the 2-norm of the solved system
  int max_iter = 50;
  double damping = 0.5;    // backtracking factor
  double min_step = 1e-14;  // smallest step fraction before giving up

  void validate() const;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double final_residual_norm = 0.0;
  /// Largest equation left out of the square system, evaluated at the
  /// returned point. Small values witness the gauge redundancy.
  double discarded_equation_residual = 0.0;
  /// Residual norm before the first step and after each accepted step.
  std::vector<double> residual_history;
};

/// How solve_full treats the phases.
///  - free: unknowns (a_1..a_N, theta_2..theta_N); the node-1 imaginary
///    equation is dropped.
///  - locked: phases are held fixed and only amplitudes move; valid when
///    every bond phase theta_{n+1} - theta_n - phi is a multiple of pi, which
///    makes all imaginary equations vanish identically (e.g. phi = 0 with
///    real seeds). All imaginary equations are dropped.
///  - automatic: locked when the seed satisfies that condition, else free.
enum class PhaseHandling { automatic, free, locked };

bool phases_locked(const StandingWave& sw, const LatticeConfig& cfg, double tol = 1e-15);

struct FullSolveResult {
  StandingWave solution;
  SolveReport report;
};

/// Damped Newton on the gauge-fixed stationary equations. Non-convergence is
/// reported, not thrown; a singular linear solve throws SingularJacobian.
FullSolveResult solve_full(const StandingWave& seed, const LatticeConfig& cfg, const NewtonOptions& opts = {},
                           PhaseHandling phases = PhaseHandling::automatic);

struct ReducedSolveResult {
  ReducedAmplitudes solution;
  SolveReport report;
};

ReducedSolveResult solve_reduced(const ReducedAmplitudes& seed, double k, double omega,
                                 const NewtonOptions& opts = {});

}  // namespace twistring
