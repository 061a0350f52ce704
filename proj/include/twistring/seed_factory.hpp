#pragma once

// Starting points for continuation and the closed-form dark-node
// constructions available at twist phi = pi/N.
//
// Site indices in this header are 0-based; "site 1" in the usual physics
// numbering is index 0.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "twistring/lattice_model.hpp"

namespace twistring {

enum class Parity { even, odd };

Parity parity_of(std::size_t n_sites) noexcept;

/// M for a ring of n sites: N/2 + 1 when N is even, (N + 1)/2 when odd.
std::size_t pivot_site_number(std::size_t n_sites) noexcept;

/// Unknowns of a dark-node reduction. Even rings hold a_1..a_{M-1} (dark
/// node at site M, bright node at site 1); odd rings hold a_2..a_M (dark
/// node at site 1, bright pair at M, M+1). Both have M - 1 entries.
class ReducedAmplitudes {
 public:
  ReducedAmplitudes(std::vector<double> values, std::size_t n_sites);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t n_sites() const noexcept { return n_sites_; }
  Parity parity() const noexcept { return parity_of(n_sites_); }
  std::size_t size() const noexcept { return values_.size(); }

  friend bool operator==(const ReducedAmplitudes&, const ReducedAmplitudes&) = default;

 private:
  std::vector<double> values_;
  std::size_t n_sites_;
};

std::size_t reduced_length(std::size_t n_sites) noexcept;

/// Anti-continuum seed: a_n = sign * sqrt(omega) on the excited sites, zero
/// elsewhere, all phases zero. `signs` may be empty (all +1) or match
/// `excited` in length.
StandingWave ac_seed(const LatticeConfig& cfg, std::span<const std::size_t> excited,
                     std::span<const int> signs = {});

/// k = 0 solution of the reduced system: sqrt(omega) on the bright site.
ReducedAmplitudes reduced_ac_seed(std::size_t n_sites, double omega);

Eigen::VectorXd reduced_residual_even(const ReducedAmplitudes& a, double k, double omega);
Eigen::VectorXd reduced_residual_odd(const ReducedAmplitudes& a, double k, double omega);
/// Dispatches on parity.
Eigen::VectorXd reduced_residual(const ReducedAmplitudes& a, double k, double omega);
Eigen::MatrixXd reduced_jacobian(const ReducedAmplitudes& a, double k, double omega);

/// Full ring solution from an even reduction; requires phi == pi/N.
StandingWave reconstruct_even(const ReducedAmplitudes& a, const LatticeConfig& cfg);
/// Full ring solution from an odd reduction; requires phi == pi/N.
StandingWave reconstruct_odd(const ReducedAmplitudes& a, const LatticeConfig& cfg);
StandingWave reconstruct(const ReducedAmplitudes& a, const LatticeConfig& cfg);

/// Inverse of reconstruct: reads the reduced unknowns back off a full state.
ReducedAmplitudes extract_reduced(const StandingWave& sw);

/// Two copies of an (N/2)-site even dark-node state laid end to end on an
/// N-site ring. Requires N % 4 == 0 and phi == 2 pi / N.
StandingWave splice_double_pulse(const StandingWave& half, const LatticeConfig& cfg);

/// Departure from the reflection symmetry a_j = a_{N-j+2}, theta_j = -theta_{N-j+2}.
struct SymmetryDefect {
  double amplitude = 0.0;  // max |a_j - a_{N-j+2}|
  double phase = 0.0;      // max wrapped |theta_j + theta_{N-j+2}| over sites where both |a| > dark_tol
};
SymmetryDefect symmetry_defect(const StandingWave& sw, double dark_tol = 1e-8);

}  // namespace twistring
