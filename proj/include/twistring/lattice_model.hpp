#pragma once

// Ring lattice of N coupled cores with a Peierls (twist) phase on every
// nearest-neighbour coupling and a cubic Kerr term:
//
//   i dc_n/dz = k_{n+1} e^{-i phi} c_{n+1} + k_{n-1} e^{i phi} c_{n-1} + g |c_n|^2 c_n
//
// with cyclic indices and g = -1 (defocusing) or +1 (focusing). A standing
// wave is c_n = a_n exp(i(omega z + theta_n)) with real, possibly negative a_n.

#include <complex>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace twistring {

using Complex = std::complex<double>;

enum class Nonlinearity { defocusing, focusing };

/// Coefficient g of the cubic term in the evolution equation.
constexpr double cubic_sign(Nonlinearity n) noexcept {
  return n == Nonlinearity::defocusing ? -1.0 : 1.0;
}

struct UniformCoupling {
  double k = 0.0;
};

/// k[n] is the coupling carried by site n: the c_n term of both neighbours'
/// equations is multiplied by k[n]. Not Hermitian unless all k agree; the
/// conserved quadratic quantity is sum k_n |c_n|^2.
struct PerEdgeCoupling {
  std::vector<double> k;
};

/// k[n] couples the pair (n, n+1): equation n carries k[n] on c_{n+1} and
/// k[n-1] on c_{n-1}. Hermitian; conserves the plain power.
struct PerBondCoupling {
  std::vector<double> k;
};

/// Coefficients of the neighbour terms: equation n reads
/// forward[n] e^{-i phi} c_{n+1} + backward[n] e^{i phi} c_{n-1} + ...
struct Hopping {
  std::vector<double> forward;
  std::vector<double> backward;
};

class CouplingProfile {
 public:
  CouplingProfile() = default;
  static CouplingProfile uniform(double k);
  static CouplingProfile per_edge(std::vector<double> k);
  static CouplingProfile per_bond(std::vector<double> k);

  bool is_uniform() const noexcept { return std::holds_alternative<UniformCoupling>(value_); }
  bool is_per_edge() const noexcept { return std::holds_alternative<PerEdgeCoupling>(value_); }
  bool is_per_bond() const noexcept { return std::holds_alternative<PerBondCoupling>(value_); }
  /// Entry `i` of the profile (0-based site, or bond i -> i+1).
  double at(std::size_t i) const;
  /// The N profile values.
  std::vector<double> expand(std::size_t n_sites) const;
  Hopping hopping(std::size_t n_sites) const;
  CouplingProfile scaled(double factor) const;
  const std::variant<UniformCoupling, PerEdgeCoupling, PerBondCoupling>& value() const noexcept { return value_; }

  friend bool operator==(const CouplingProfile& a, const CouplingProfile& b);

 private:
  using Variant = std::variant<UniformCoupling, PerEdgeCoupling, PerBondCoupling>;
  explicit CouplingProfile(Variant v) : value_(std::move(v)) {}
  Variant value_{UniformCoupling{}};
};

struct LatticeConfig {
  std::size_t n_sites = 6;
  CouplingProfile couplings;
  double twist = 0.0;  // phi, radians
  double omega = 1.0;  // propagation constant
  Nonlinearity nonlinearity = Nonlinearity::defocusing;

  /// Throws InvalidArgument / DimensionError on a malformed configuration.
  void validate() const;

  LatticeConfig with_couplings(CouplingProfile c) const;
  LatticeConfig with_twist(double phi) const;
};

/// Wraps an angle into (-pi, pi].
double wrap_phase(double theta) noexcept;

/// Amplitudes and phases of a bound state. Stored gauge-fixed (theta_1 = 0)
/// with every phase wrapped into (-pi, pi].
class StandingWave {
 public:
  StandingWave() = default;
  StandingWave(std::vector<double> amplitudes, std::vector<double> phases);
  static StandingWave zero(std::size_t n_sites);

  std::size_t size() const noexcept { return amplitudes_.size(); }
  const std::vector<double>& amplitudes() const noexcept { return amplitudes_; }
  const std::vector<double>& phases() const noexcept { return phases_; }
  double amplitude(std::size_t site) const { return amplitudes_.at(site); }
  double phase(std::size_t site) const { return phases_.at(site); }

  friend bool operator==(const StandingWave&, const StandingWave&) = default;

 private:
  std::vector<double> amplitudes_;
  std::vector<double> phases_;
};

/// Same state with every phase in (-pi/2, pi/2], flipping amplitude signs
/// where needed.
StandingWave half_plane_normalized(const StandingWave& sw);

/// Field c_n at fixed z.
struct ComplexState {
  std::vector<Complex> values;

  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const ComplexState&, const ComplexState&) = default;
};

/// Real and imaginary parts of the stationary equation, interleaved per site:
/// (Re_1, Im_1, ..., Re_N, Im_N). Site n contributes
///   k_{n+1} a_{n+1} e^{i(theta_{n+1}-theta_n-phi)} + k_{n-1} a_{n-1} e^{i(theta_{n-1}-theta_n+phi)}
///     + omega a_n + g a_n^3.
Eigen::VectorXd residual(const StandingWave& sw, const LatticeConfig& cfg);

/// Analytic derivative of `residual`. Unknown 2n is a_n, unknown 2n+1 is theta_n.
Eigen::MatrixXd jacobian(const StandingWave& sw, const LatticeConfig& cfg);

/// dc/dz. The span overload writes into `out` without allocating; `h` must
/// be cfg.couplings.hopping(N).
ComplexState evolution_rhs(const ComplexState& c, const LatticeConfig& cfg);
void evolution_rhs(std::span<const Complex> c, const LatticeConfig& cfg, const Hopping& h,
                   std::span<Complex> out);

/// Conserved energy for uniform and per-bond couplings. Per-site (PerEdge)
/// profiles are refused.
double hamiltonian(const ComplexState& c, const LatticeConfig& cfg);

/// Sum of |c_n|^2.
double power(const ComplexState& c);

/// The conserved quadratic quantity: sum k_n |c_n|^2 for PerEdge profiles
/// (where the plain power drifts), the plain power otherwise.
double conserved_power(const ComplexState& c, const LatticeConfig& cfg);

ComplexState gauge_rotate(const ComplexState& c, double theta);

/// c_n = a_n exp(i(omega z + theta_n)).
ComplexState to_complex(const StandingWave& sw, double z, const LatticeConfig& cfg);

/// Polar decomposition with non-negative amplitudes, gauge-fixed on site 1.
StandingWave from_complex(const ComplexState& c);

}  // namespace twistring
