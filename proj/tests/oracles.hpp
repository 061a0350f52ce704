#pragma once

// Reference computations that do not go through the library code under test.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "twistring/lattice_model.hpp"

namespace test {

using twistring::Complex;
using twistring::LatticeConfig;
using twistring::StandingWave;

template <std::size_t N>
StandingWave wave_from_golden(const double (&re)[N], const double (&im)[N]) {
  std::vector<double> a(N), t(N);
  for (std::size_t i = 0; i < N; ++i) {
    a[i] = std::hypot(re[i], im[i]);
    t[i] = std::atan2(im[i], re[i]);
  }
  return StandingWave(a, t);
}

template <std::size_t N>
std::vector<Complex> field_from_golden(const double (&re)[N], const double (&im)[N]) {
  std::vector<Complex> c(N);
  for (std::size_t i = 0; i < N; ++i) c[i] = {re[i], im[i]};
  return c;
}

/// Complex values with site 1 rotated onto the positive real axis.
inline std::vector<Complex> gauge_fixed_field(const StandingWave& sw) {
  std::vector<Complex> c(sw.size());
  for (std::size_t i = 0; i < sw.size(); ++i) c[i] = std::polar(1.0, sw.phase(i)) * sw.amplitude(i);
  if (!c.empty() && c[0].real() < 0) {
    for (auto& x : c) x = -x;
  }
  return c;
}

inline double max_field_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

/// Central differences of residual() in the interleaved (a_n, theta_n) unknowns.
inline Eigen::MatrixXd fd_jacobian(const StandingWave& sw, const LatticeConfig& cfg, double h = 1e-6) {
  const std::size_t n = sw.size();
  Eigen::MatrixXd j(2 * n, 2 * n);
  for (std::size_t col = 0; col < 2 * n; ++col) {
    auto a_p = sw.amplitudes(), a_m = sw.amplitudes();
    auto t_p = sw.phases(), t_m = sw.phases();
    if (col % 2 == 0) {
      a_p[col / 2] += h;
      a_m[col / 2] -= h;
    } else {
      t_p[col / 2] += h;
      t_m[col / 2] -= h;
    }
    // The constructor re-gauges on theta_1; harmless, the residual only sees
    // phase differences.
    const auto rp = twistring::residual(StandingWave(a_p, t_p), cfg);
    const auto rm = twistring::residual(StandingWave(a_m, t_m), cfg);
    j.col(static_cast<Eigen::Index>(col)) = (rp - rm) / (2 * h);
  }
  return j;
}

/// Finite-difference linearization of the flow in the frame rotating at omega,
/// in stacked unknowns (Re u_1..Re u_N, Im u_1..Im u_N).
inline Eigen::MatrixXd fd_linearization(const std::vector<Complex>& u, const LatticeConfig& cfg, double h = 1e-6) {
  const std::size_t n = u.size();
  auto flow = [&](const std::vector<Complex>& x) {
    const auto rhs = twistring::evolution_rhs(twistring::ComplexState{x}, cfg);
    Eigen::VectorXd out(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex d = rhs.values[i] - Complex(0.0, cfg.omega) * x[i];
      out[static_cast<Eigen::Index>(i)] = d.real();
      out[static_cast<Eigen::Index>(n + i)] = d.imag();
    }
    return out;
  };
  Eigen::MatrixXd a(2 * n, 2 * n);
  for (std::size_t col = 0; col < 2 * n; ++col) {
    auto up = u, um = u;
    const Complex dir = col < n ? Complex(h, 0.0) : Complex(0.0, h);
    up[col % n] += dir;
    um[col % n] -= dir;
    a.col(static_cast<Eigen::Index>(col)) = (flow(up) - flow(um)) / (2 * h);
  }
  return a;
}

/// Eigenvalues of the linearization about the zero state, from plane waves
/// c_n ~ e^{i q n}, q = 2 pi m / N: lambda = +/- i (omega + 2 k cos(q + phi)).
inline std::vector<double> circulant_imaginary_parts(std::size_t n, double k, double phi, double omega) {
  std::vector<double> out;
  for (std::size_t m = 0; m < n; ++m) {
    const double w = omega + 2 * k * std::cos(2 * std::numbers::pi * static_cast<double>(m) / n + phi);
    out.push_back(w);
    out.push_back(-w);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Critical coupling of the even dark-node branch. The branch leaves the zero
/// state where the reduced operator k(x_{j-1} + x_{j+1}) + omega x_j, with a
/// mirror at the bright site and a zero at the dark site, becomes singular;
/// its lowest mode gives k0 = omega / (2 cos(pi / N)).
inline double k0_analytic(std::size_t n, double omega) {
  return omega / (2 * std::cos(std::numbers::pi / static_cast<double>(n)));
}

}  // namespace test
