#include "twistring/newton_solver.hpp"

#include <algorithm>
#include <cmath>

#include "damped_newton.hpp"
#include "twistring/errors.hpp"

namespace twistring {

void NewtonOptions::validate() const {
  if (!(tol_residual > 0.0)) throw InvalidArgument("Newton tolerance must be positive");
  if (max_iter < 1) throw InvalidArgument("Newton needs max_iter >= 1");
  if (!(damping > 0.0 && damping < 1.0)) throw InvalidArgument("Newton damping must lie in (0, 1)");
  if (!(min_step > 0.0)) throw InvalidArgument("Newton min_step must be positive");
}

bool phases_locked(const StandingWave& sw, const LatticeConfig& cfg, double tol) {
  const std::size_t n = sw.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double bond = sw.phase((i + 1) % n) - sw.phase(i) - cfg.twist;
    if (std::abs(std::sin(bond)) > tol) return false;
  }
  return true;
}

FullSolveResult solve_full(const StandingWave& seed, const LatticeConfig& cfg, const NewtonOptions& opts,
                           PhaseHandling phases) {
  opts.validate();
  cfg.validate();
  if (seed.size() != cfg.n_sites) throw DimensionError("seed length does not match lattice size");
  for (std::size_t i = 0; i < seed.size(); ++i) {
    if (!std::isfinite(seed.amplitude(i)) || !std::isfinite(seed.phase(i))) {
      throw InvalidArgument("Newton seed has non-finite entries");
    }
  }

  const std::size_t n = cfg.n_sites;
  const bool locked = phases == PhaseHandling::locked ||
                      (phases == PhaseHandling::automatic && phases_locked(seed, cfg));

  // Selected rows of the interleaved residual and columns of the interleaved
  // unknowns (2s -> a_s, 2s+1 -> theta_s).
  std::vector<Eigen::Index> rows, cols, dropped;
  for (std::size_t s = 0; s < n; ++s) {
    const auto re = static_cast<Eigen::Index>(2 * s);
    rows.push_back(re);
    cols.push_back(re);
    if (locked) {
      dropped.push_back(re + 1);
    } else if (s == 0) {
      dropped.push_back(re + 1);
    } else {
      rows.push_back(re + 1);
      cols.push_back(re + 1);
    }
  }

  const auto& fixed_phases = seed.phases();
  auto unpack = [&](const Eigen::VectorXd& x) {
    std::vector<double> a(n), th(fixed_phases);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto idx = static_cast<std::size_t>(cols[c]);
      if (idx % 2 == 0) {
        a[idx / 2] = x[static_cast<Eigen::Index>(c)];
      } else {
        th[idx / 2] = x[static_cast<Eigen::Index>(c)];
      }
    }
    // raw phases: no wrap or gauge shift inside the iteration
    return std::pair{std::move(a), std::move(th)};
  };
  auto as_wave = [&](const Eigen::VectorXd& x) {
    auto [a, th] = unpack(x);
    return StandingWave(std::move(a), std::move(th));
  };

  Eigen::VectorXd x(static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto idx = static_cast<std::size_t>(cols[c]);
    x[static_cast<Eigen::Index>(c)] = idx % 2 == 0 ? seed.amplitude(idx / 2) : seed.phase(idx / 2);
  }

  auto res = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return residual(as_wave(v), cfg)(rows); };
  auto jac = [&](const Eigen::VectorXd& v) -> Eigen::MatrixXd { return jacobian(as_wave(v), cfg)(rows, cols); };

  SolveReport report = detail::damped_newton(x, res, jac, opts);
  StandingWave solution = as_wave(x);
  const Eigen::VectorXd full = residual(solution, cfg);
  double discarded = 0.0;
  for (auto d : dropped) discarded = std::max(discarded, std::abs(full[d]));
  report.discarded_equation_residual = discarded;
  if (report.converged && !(discarded <= 10.0 * opts.tol_residual)) report.converged = false;
  return {std::move(solution), std::move(report)};
}

ReducedSolveResult solve_reduced(const ReducedAmplitudes& seed, double k, double omega, const NewtonOptions& opts) {
  opts.validate();
  const std::size_t n_sites = seed.n_sites();
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(seed.values().data(),
                                                        static_cast<Eigen::Index>(seed.size()));
  auto wrap = [&](const Eigen::VectorXd& v) {
    return ReducedAmplitudes(std::vector<double>(v.data(), v.data() + v.size()), n_sites);
  };
  auto res = [&](const Eigen::VectorXd& v) { return reduced_residual(wrap(v), k, omega); };
  auto jac = [&](const Eigen::VectorXd& v) { return reduced_jacobian(wrap(v), k, omega); };
  SolveReport report = detail::damped_newton(x, res, jac, opts);
  return {wrap(x), std::move(report)};
}

}  // namespace twistring
