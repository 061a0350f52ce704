#include "twistring/stability.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "twistring/errors.hpp"

namespace twistring {

namespace {

using Real = long double;
using ExtendedVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

struct RingData {
  std::vector<Real> kp, km;  // forward / backward hopping per equation
  Real cos_phi, sin_phi, omega, g;
};

RingData ring_data(const LatticeConfig& cfg) {
  RingData d;
  const Hopping h = cfg.couplings.hopping(cfg.n_sites);
  d.kp.assign(h.forward.begin(), h.forward.end());
  d.km.assign(h.backward.begin(), h.backward.end());
  const Real phi = cfg.twist;
  d.cos_phi = std::cos(phi);
  d.sin_phi = std::sin(phi);
  d.omega = cfg.omega;
  d.g = cubic_sign(cfg.nonlinearity);
  return d;
}

// Stacked (v, w).
ExtendedMatrix assemble(const ExtendedVector& vw, const RingData& d) {
  const auto n = static_cast<Eigen::Index>(d.kp.size());
  ExtendedMatrix a = ExtendedMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index p = (i + 1) % n;
    const Eigen::Index m = (i + n - 1) % n;
    const Real kp = d.kp[static_cast<std::size_t>(i)];
    const Real km = d.km[static_cast<std::size_t>(i)];
    // S block on both diagonal blocks, C block off-diagonal.
    a(i, p) += -kp * d.sin_phi;
    a(i, m) += km * d.sin_phi;
    a(n + i, n + p) += -kp * d.sin_phi;
    a(n + i, n + m) += km * d.sin_phi;
    a(i, n + p) += kp * d.cos_phi;
    a(i, n + m) += km * d.cos_phi;
    a(n + i, p) += -kp * d.cos_phi;
    a(n + i, m) += -km * d.cos_phi;

    const Real v = vw[i], w = vw[n + i];
    a(i, i) += d.g * 2 * v * w;
    a(i, n + i) += d.omega + d.g * (v * v + 3 * w * w);
    a(n + i, i) += -d.omega - d.g * (3 * v * v + w * w);
    a(n + i, n + i) += -d.g * 2 * v * w;
  }
  return a;
}

// Stationary equation in the rotating frame, stacked (Re F, Im F).
ExtendedVector cartesian_residual(const ExtendedVector& vw, const RingData& d) {
  const auto n = static_cast<Eigen::Index>(d.kp.size());
  using C = std::complex<Real>;
  const C fwd(d.cos_phi, -d.sin_phi), bwd(d.cos_phi, d.sin_phi);
  ExtendedVector r(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index p = (i + 1) % n;
    const Eigen::Index m = (i + n - 1) % n;
    const C ui(vw[i], vw[n + i]), up(vw[p], vw[n + p]), um(vw[m], vw[n + m]);
    const C f = d.kp[static_cast<std::size_t>(i)] * fwd * up + d.km[static_cast<std::size_t>(i)] * bwd * um +
                d.omega * ui + d.g * std::norm(ui) * ui;
    r[i] = f.real();
    r[n + i] = f.imag();
  }
  return r;
}

// Newton on the Cartesian system, bordered with the gauge direction (-w, v).
// The Jacobian of (Re F, Im F) is read off A: with d(p,q)/dz = A(p,q) and
// d/dz = -i F, Re dF = -A_lower and Im dF = A_upper.
Real polish(ExtendedVector& vw, const RingData& d) {
  const auto n = static_cast<Eigen::Index>(d.kp.size());
  ExtendedVector r = cartesian_residual(vw, d);
  Real norm = r.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < 6 && norm > 0; ++it) {
    const ExtendedMatrix a = assemble(vw, d);
    ExtendedMatrix b = ExtendedMatrix::Zero(2 * n + 1, 2 * n + 1);
    b.topLeftCorner(n, 2 * n) = -a.bottomRows(n);
    b.block(n, 0, n, 2 * n) = a.topRows(n);
    ExtendedVector gauge(2 * n);
    gauge.head(n) = -vw.tail(n);
    gauge.tail(n) = vw.head(n);
    b.topRightCorner(2 * n, 1) = gauge;
    b.bottomLeftCorner(1, 2 * n) = gauge.transpose();
    ExtendedVector rhs = ExtendedVector::Zero(2 * n + 1);
    rhs.head(2 * n) = -r;
    const ExtendedVector step = b.partialPivLu().solve(rhs);
    if (!step.allFinite()) break;
    ExtendedVector trial = vw + step.head(2 * n);
    ExtendedVector r_trial = cartesian_residual(trial, d);
    const Real trial_norm = r_trial.lpNorm<Eigen::Infinity>();
    if (!(trial_norm < norm)) break;
    vw = std::move(trial);
    r = std::move(r_trial);
    norm = trial_norm;
  }
  return norm;
}

}  // namespace

const char* to_string(StabilityClass c) noexcept {
  return c == StabilityClass::neutrally_stable ? "neutrally_stable" : "unstable";
}

LinearizationMatrix build_linearization(const StandingWave& sw, const LatticeConfig& cfg, bool do_polish) {
  cfg.validate();
  if (sw.size() != cfg.n_sites) throw DimensionError("standing wave length does not match lattice size");
  const auto n = static_cast<Eigen::Index>(cfg.n_sites);
  const RingData d = ring_data(cfg);

  ExtendedVector vw(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real a = sw.amplitude(static_cast<std::size_t>(i));
    const Real th = sw.phase(static_cast<std::size_t>(i));
    vw[i] = a * std::cos(th);
    vw[n + i] = a * std::sin(th);
  }

  LinearizationMatrix out;
  Real res = cartesian_residual(vw, d).lpNorm<Eigen::Infinity>();
  if (do_polish && res <= 1e-8L) {
    res = polish(vw, d);
    out.polished = true;
  }
  out.state_residual = static_cast<double>(res);
  out.entries = assemble(vw, d);
  return out;
}

StabilityClass classify(Spectrum& spec, double zero_tol) {
  spec.max_real_part = -std::numeric_limits<double>::infinity();
  spec.kernel_algebraic_multiplicity = 0;
  for (const auto& l : spec.eigenvalues) {
    spec.max_real_part = std::max(spec.max_real_part, l.real());
    if (std::abs(l) <= zero_tol) ++spec.kernel_algebraic_multiplicity;
  }
  spec.classification =
      spec.max_real_part <= zero_tol ? StabilityClass::neutrally_stable : StabilityClass::unstable;
  return spec.classification;
}

Spectrum eigenvalues(const LinearizationMatrix& m, double zero_tol) {
  if (!m.entries.allFinite()) throw InvalidArgument("linearization has non-finite entries");
  Eigen::EigenSolver<ExtendedMatrix> solver(m.entries, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw EigenSolverError("QR iteration did not converge");

  Spectrum spec;
  const auto& ev = solver.eigenvalues();
  spec.eigenvalues.reserve(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    spec.eigenvalues.emplace_back(static_cast<double>(ev[i].real()), static_cast<double>(ev[i].imag()));
  }
  std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end(), [](const auto& a, const auto& b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });

  Eigen::BDCSVD<ExtendedMatrix> svd(m.entries);
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()[i] <= zero_tol) ++spec.kernel_geometric_multiplicity;
  }
  classify(spec, zero_tol);
  return spec;
}

std::pair<std::complex<double>, std::complex<double>> dispersion(double q, const LatticeConfig& cfg) {
  if (!cfg.couplings.is_uniform()) throw UnsupportedConfiguration("dispersion relation needs uniform coupling");
  const double band = cfg.omega + 2.0 * cfg.couplings.at(0) * std::cos(q + cfg.twist);
  return {{0.0, band}, {0.0, -band}};
}

Spectrum spectrum_of(const StandingWave& sw, const LatticeConfig& cfg, double zero_tol) {
  return eigenvalues(build_linearization(sw, cfg), zero_tol);
}

}  // namespace twistring
