#pragma once

// Linear stability of standing waves. With c_n = (v_n + i w_n) e^{i omega z}
// and perturbation (p, q) of (v, w), the linearized flow is d/dz (p, q) = A (p, q):
//
//   A = [[ kS + g diag(2vw),            kC + omega I + g diag(v^2 + 3w^2) ],
//        [ -kC - omega I - g diag(3v^2 + w^2), kS - g diag(2vw)          ]]
//
// where C carries cos(phi) and S carries -sin(phi) (super) / +sin(phi) (sub)
// on the cyclic off-diagonals, scaled by the forward / backward hopping of
// the row's equation.
//
// The gauge symmetry gives A a 2x2 Jordan block at zero. A backward-stable
// eigensolver splits such a block by ~sqrt(eps * |A|), so the matrix is
// assembled and diagonalized in long double after the state has been
// re-solved to long double accuracy.

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "twistring/lattice_model.hpp"

namespace twistring {

using ExtendedMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

struct LinearizationMatrix {
  ExtendedMatrix entries;  // 2N x 2N, unknowns ordered (p_1..p_N, q_1..q_N)
  /// Max-norm of the stationary residual of the state the matrix was built
  /// from, after polishing (in long double).
  double state_residual = 0.0;
  bool polished = false;

  Eigen::MatrixXd to_double() const { return entries.cast<double>(); }
};

/// Builds A about `sw`. When `polish` is set and the state is already a
/// solution to ~1e-8, a few long double Newton steps (Cartesian unknowns,
/// gauge fixed by a bordering row) remove the double-precision residual first.
LinearizationMatrix build_linearization(const StandingWave& sw, const LatticeConfig& cfg, bool polish = true);

enum class StabilityClass { neutrally_stable, unstable };

const char* to_string(StabilityClass c) noexcept;

struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;  // sorted by (imag, real)
  double max_real_part = 0.0;
  int kernel_algebraic_multiplicity = 0;  // eigenvalues with |lambda| <= zero_tol
  int kernel_geometric_multiplicity = 0;  // singular values <= zero_tol; informational
  StabilityClass classification = StabilityClass::unstable;
};

/// All 2N eigenvalues (Hessenberg reduction + shifted QR in long double),
/// classified with `zero_tol`.
Spectrum eigenvalues(const LinearizationMatrix& m, double zero_tol = 1e-8);

/// Neutrally stable iff every Re(lambda) <= zero_tol. Also refreshes
/// max_real_part and the kernel count of `spec`.
StabilityClass classify(Spectrum& spec, double zero_tol = 1e-8);

/// Plane-wave eigenvalues +/- i(omega + 2k cos(q + phi)) of the linearization
/// about the zero state. Uniform coupling only.
std::pair<std::complex<double>, std::complex<double>> dispersion(double q, const LatticeConfig& cfg);

/// build_linearization + eigenvalues.
Spectrum spectrum_of(const StandingWave& sw, const LatticeConfig& cfg, double zero_tol = 1e-8);

}  // namespace twistring
