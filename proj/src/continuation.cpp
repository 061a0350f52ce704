#include "twistring/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "damped_newton.hpp"
#include "parallel.hpp"
#include "twistring/errors.hpp"

namespace twistring {

namespace {

std::optional<FullSolveResult> try_solve_full(const StandingWave& seed, const LatticeConfig& cfg,
                                              const NewtonOptions& opts) {
  try {
    auto r = solve_full(seed, cfg, opts);
    if (r.report.converged) return r;
  } catch (const SingularJacobian&) {
  }
  return std::nullopt;
}

std::optional<ReducedSolveResult> try_solve_reduced(const ReducedAmplitudes& seed, double k, double omega,
                                                    const NewtonOptions& opts) {
  try {
    auto r = solve_reduced(seed, k, omega, opts);
    if (r.report.converged) return r;
  } catch (const SingularJacobian&) {
  }
  return std::nullopt;
}

BranchPoint full_point(double value, const StandingWave& sw, const LatticeConfig& cfg, bool converged) {
  return {value, sw, l2_norm(sw), converged, residual(sw, cfg).lpNorm<Eigen::Infinity>()};
}

BranchPoint reduced_point(double k, const ReducedAmplitudes& a, double omega, bool converged) {
  return {k, a, l2_norm_reduced(a), converged, reduced_residual(a, k, omega).lpNorm<Eigen::Infinity>()};
}

// dF/dk for the reduced system, which is linear in k.
Eigen::VectorXd reduced_coupling_derivative(const ReducedAmplitudes& a) {
  return reduced_residual(a, 1.0, 0.0) - reduced_residual(a, 0.0, 0.0);
}

ReducedAmplitudes from_eigen(const Eigen::VectorXd& v, std::size_t n_sites) {
  return ReducedAmplitudes(std::vector<double>(v.data(), v.data() + v.size()), n_sites);
}

Eigen::VectorXd to_eigen(const ReducedAmplitudes& a) {
  return Eigen::Map<const Eigen::VectorXd>(a.values().data(), static_cast<Eigen::Index>(a.size()));
}

}  // namespace

const char* to_string(ContinuationParameter p) noexcept {
  switch (p) {
    case ContinuationParameter::coupling_k:
      return "coupling_k";
    case ContinuationParameter::coupling_scale:
      return "coupling_scale";
    case ContinuationParameter::twist_phi:
      return "twist_phi";
  }
  return "unknown";
}

void ContinuationOptions::validate() const {
  if (!(ds > 0.0)) throw InvalidArgument("continuation step must be positive");
  if (max_halvings < 0) throw InvalidArgument("max_halvings must be non-negative");
  newton.validate();
}

double l2_norm(const StandingWave& sw) {
  double s = 0.0;
  for (double a : sw.amplitudes()) s += a * a;
  return std::sqrt(s);
}

double l2_norm_reduced(const ReducedAmplitudes& a) {
  double s = 0.0;
  for (double x : a.values()) s += x * x;
  return std::sqrt(s);
}

LatticeConfig with_parameter(const LatticeConfig& base, ContinuationParameter p, double value) {
  switch (p) {
    case ContinuationParameter::coupling_k:
      if (!base.couplings.is_uniform()) {
        throw InvalidArgument("coupling_k continuation needs a uniform profile; use coupling_scale");
      }
      return base.with_couplings(CouplingProfile::uniform(value));
    case ContinuationParameter::coupling_scale:
      return base.with_couplings(base.couplings.scaled(value));
    case ContinuationParameter::twist_phi:
      return base.with_twist(value);
  }
  throw InvalidArgument("unknown continuation parameter");
}

Branch continue_natural(const StandingWave& start, const LatticeConfig& base, ContinuationParameter p, double from,
                        double to, const ContinuationOptions& opts) {
  opts.validate();
  Branch br;
  br.parameter = p;
  br.config = with_parameter(base, p, from);

  auto first = try_solve_full(start, br.config, opts.newton);
  if (!first) {
    br.points.push_back(full_point(from, start, br.config, false));
    br.truncated = true;
    br.note = "initial point did not converge";
    return br;
  }
  br.points.push_back(full_point(from, first->solution, br.config, true));

  StandingWave current = first->solution;
  // Landing on the zero state means the branch has ended (or a step jumped
  // off it); either way it is not a continuation of the start.
  const double collapse_norm = 1e-6 * l2_norm(current);
  double at = from;
  const double dir = to >= from ? 1.0 : -1.0;
  double step = opts.ds;
  int halvings = 0;
  bool collapsed = false;
  while ((to - at) * dir > 0.0) {
    const bool last = std::abs(to - at) <= step;
    const double next = last ? to : at + dir * step;
    const LatticeConfig cfg = with_parameter(base, p, next);
    auto r = try_solve_full(current, cfg, opts.newton);
    collapsed = r && l2_norm(r->solution) < collapse_norm;
    if (r && !collapsed) {
      current = r->solution;
      at = next;
      br.points.push_back(full_point(next, current, cfg, true));
      halvings = 0;
      step = std::min(opts.ds, 2.0 * step);
      continue;
    }
    if (halvings >= opts.max_halvings) {
      br.truncated = true;
      br.note = std::string(collapsed ? "branch collapsed onto the zero state at " : "step failed at ") +
                to_string(p) + " = " + std::to_string(next);
      break;
    }
    step *= 0.5;
    ++halvings;
  }
  return br;
}

Branch continue_reduced(const ReducedAmplitudes& start, double omega, double k_from, double k_to,
                        const ContinuationOptions& opts) {
  opts.validate();
  Branch br;
  br.parameter = ContinuationParameter::coupling_k;
  br.config.n_sites = start.n_sites();
  br.config.omega = omega;
  br.config.couplings = CouplingProfile::uniform(k_from);

  auto first = try_solve_reduced(start, k_from, omega, opts.newton);
  if (!first) {
    br.points.push_back(reduced_point(k_from, start, omega, false));
    br.truncated = true;
    br.note = "initial point did not converge";
    return br;
  }
  br.points.push_back(reduced_point(k_from, first->solution, omega, true));

  ReducedAmplitudes current = first->solution;
  const double collapse_norm = 1e-6 * l2_norm_reduced(current);
  double at = k_from;
  const double dir = k_to >= k_from ? 1.0 : -1.0;
  double step = opts.ds;
  int halvings = 0;
  bool collapsed = false;
  while ((k_to - at) * dir > 0.0) {
    const bool last = std::abs(k_to - at) <= step;
    const double next = last ? k_to : at + dir * step;
    auto r = try_solve_reduced(current, next, omega, opts.newton);
    collapsed = r && l2_norm_reduced(r->solution) < collapse_norm;
    if (r && !collapsed) {
      current = r->solution;
      at = next;
      br.points.push_back(reduced_point(next, current, omega, true));
      halvings = 0;
      step = std::min(opts.ds, 2.0 * step);
      continue;
    }
    if (halvings >= opts.max_halvings) {
      br.truncated = true;
      br.note = std::string(collapsed ? "branch collapsed onto the zero state at" : "step failed at") +
                " k = " + std::to_string(next);
      break;
    }
    step *= 0.5;
    ++halvings;
  }
  return br;
}

Branch continue_reduced_arclength(const ReducedAmplitudes& start, double omega, double k_start, double k_stop,
                                  double norm_floor, const ArclengthOptions& opts) {
  opts.newton.validate();
  const std::size_t n_sites = start.n_sites();
  const auto len = static_cast<Eigen::Index>(start.size());

  Branch br;
  br.parameter = ContinuationParameter::coupling_k;
  br.config.n_sites = n_sites;
  br.config.omega = omega;
  br.config.couplings = CouplingProfile::uniform(k_start);

  auto first = try_solve_reduced(start, k_start, omega, opts.newton);
  if (!first) {
    br.points.push_back(reduced_point(k_start, start, omega, false));
    br.truncated = true;
    br.note = "initial point did not converge";
    return br;
  }
  br.points.push_back(reduced_point(k_start, first->solution, omega, true));

  // Augmented unknown y = (x, k).
  Eigen::VectorXd y(len + 1);
  y.head(len) = to_eigen(first->solution);
  y[len] = k_start;

  auto bordered = [&](const Eigen::VectorXd& at, const Eigen::VectorXd& last_row) {
    const auto a = from_eigen(at.head(len), n_sites);
    Eigen::MatrixXd m(len + 1, len + 1);
    m.topLeftCorner(len, len) = reduced_jacobian(a, at[len], omega);
    m.topRightCorner(len, 1) = reduced_coupling_derivative(a);
    m.row(len) = last_row.transpose();
    return m;
  };

  // Initial tangent along increasing k.
  Eigen::VectorXd tangent(len + 1);
  {
    const auto a = from_eigen(y.head(len), n_sites);
    tangent.head(len) = reduced_jacobian(a, y[len], omega).partialPivLu().solve(-reduced_coupling_derivative(a));
    tangent[len] = 1.0;
    tangent.normalize();
  }

  double ds = opts.ds;
  for (int step = 0; step < opts.max_steps; ++step) {
    const Eigen::VectorXd predicted = y + ds * tangent;
    Eigen::VectorXd corrected = predicted;
    auto res = [&](const Eigen::VectorXd& v) {
      Eigen::VectorXd g(len + 1);
      g.head(len) = reduced_residual(from_eigen(v.head(len), n_sites), v[len], omega);
      g[len] = tangent.dot(v - predicted);
      return g;
    };
    auto jac = [&](const Eigen::VectorXd& v) { return bordered(v, tangent); };
    bool ok = false;
    try {
      ok = detail::damped_newton(corrected, res, jac, opts.newton).converged;
    } catch (const SingularJacobian&) {
      ok = false;
    }
    if (!ok) {
      ds *= 0.5;
      if (ds < opts.ds_min) {
        br.truncated = true;
        br.note = "arclength step fell below ds_min";
        break;
      }
      continue;
    }

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(len + 1);
    rhs[len] = 1.0;
    Eigen::VectorXd next_tangent = bordered(corrected, tangent).partialPivLu().solve(rhs);
    next_tangent.normalize();
    if (next_tangent.dot(tangent) < 0.0) next_tangent = -next_tangent;
    tangent = next_tangent;
    y = corrected;

    const auto a = from_eigen(y.head(len), n_sites);
    br.points.push_back(reduced_point(y[len], a, omega, true));
    if (y[len] > k_stop || l2_norm_reduced(a) < norm_floor) break;
    ds = std::min(opts.ds, 1.5 * ds);
  }
  return br;
}

TraceResult trace_from_ac(const LatticeConfig& target, std::span<const std::size_t> excited,
                          std::span<const int> signs, const ContinuationOptions& opts) {
  target.validate();
  TraceResult out;
  const LatticeConfig untwisted = target.with_twist(0.0);
  const StandingWave seed = ac_seed(untwisted, excited, signs);

  if (target.couplings.is_uniform()) {
    out.coupling_leg = continue_natural(seed, untwisted, ContinuationParameter::coupling_k, 0.0,
                                        target.couplings.at(0), opts);
  } else {
    out.coupling_leg = continue_natural(seed, untwisted, ContinuationParameter::coupling_scale, 0.0, 1.0, opts);
  }
  const auto& last = out.coupling_leg.points.back();
  out.endpoint = std::get<StandingWave>(last.solution);
  if (out.coupling_leg.truncated || !last.converged) return out;

  out.twist_leg = continue_natural(out.endpoint, target, ContinuationParameter::twist_phi, 0.0, target.twist, opts);
  const auto& end = out.twist_leg.points.back();
  out.endpoint = std::get<StandingWave>(end.solution);
  out.complete = !out.twist_leg.truncated && end.converged;
  return out;
}

std::vector<PhiScanRow> scan_min_node_vs_phi(const LatticeConfig& base, std::span<const double> ks,
                                             std::span<const double> phis, std::span<const std::size_t> excited,
                                             const ContinuationOptions& opts, unsigned threads) {
  if (!base.couplings.is_uniform()) throw InvalidArgument("phi scan needs a uniform coupling profile");
  if (!std::is_sorted(phis.begin(), phis.end())) throw InvalidArgument("phi grid must be ascending");

  std::vector<std::vector<PhiScanRow>> per_k(ks.size());
  detail::parallel_for(ks.size(), threads, [&](std::size_t ik) {
    const double k = ks[ik];
    const LatticeConfig cfg = base.with_couplings(CouplingProfile::uniform(k)).with_twist(0.0);
    auto& rows = per_k[ik];
    auto gap = [&](double phi) {
      rows.push_back({k, phi, 0, std::numeric_limits<double>::quiet_NaN(), false});
    };

    const Branch leg = continue_natural(ac_seed(cfg, excited), cfg, ContinuationParameter::coupling_k, 0.0, k, opts);
    if (leg.truncated || !leg.points.back().converged) {
      for (double phi : phis) gap(phi);
      return;
    }
    StandingWave current = std::get<StandingWave>(leg.points.back().solution);
    double at = 0.0;
    for (double phi : phis) {
      const Branch b = continue_natural(current, cfg, ContinuationParameter::twist_phi, at, phi, opts);
      const auto& end = b.points.back();
      if (b.truncated || !end.converged || end.param_value != phi) {
        gap(phi);
        continue;
      }
      current = std::get<StandingWave>(end.solution);
      at = phi;
      const auto& amp = current.amplitudes();
      std::size_t best = 0;
      for (std::size_t s = 1; s < amp.size(); ++s) {
        if (std::abs(amp[s]) < std::abs(amp[best])) best = s;
      }
      rows.push_back({k, phi, best, std::abs(amp[best]), true});
    }
  });

  std::vector<PhiScanRow> out;
  for (auto& rows : per_k) out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

K0Result detect_k0(std::size_t n_sites, double omega, const K0Options& opts) {
  if (!(omega > 0.0)) throw InvalidArgument("k0 search needs omega > 0");
  if (!(opts.ds > 0.0 && opts.norm_floor > 0.0 && opts.k_tol > 0.0)) {
    throw InvalidArgument("k0 search needs positive ds, norm_floor and k_tol");
  }
  opts.newton.validate();

  K0Result out;
  Branch& br = out.branch;
  br.parameter = ContinuationParameter::coupling_k;
  br.config.n_sites = n_sites;
  br.config.omega = omega;
  br.config.couplings = CouplingProfile::uniform(0.0);

  ReducedAmplitudes current = reduced_ac_seed(n_sites, omega);
  br.points.push_back(reduced_point(0.0, current, omega, true));

  auto nontrivial = [&](const std::optional<ReducedSolveResult>& r) {
    return r && l2_norm_reduced(r->solution) >= opts.norm_floor;
  };
  // Past the collapse a long step can land on another nontrivial branch.
  // Steps on this branch stay within |current| of the previous point.
  auto on_branch = [&](const ReducedAmplitudes& next) {
    const double jump = (to_eigen(next) - to_eigen(current)).norm();
    return jump <= l2_norm_reduced(current);
  };

  double k_lo = 0.0;
  double k_hi = std::numeric_limits<double>::quiet_NaN();
  double step = opts.ds;
  int failures_at_min = 0;
  const double min_step = opts.ds * std::ldexp(1.0, -opts.max_halvings);
  // Generous cap; the dark-node branch collapses well before k = omega.
  const double k_cap = 4.0 * omega;

  while (std::isnan(k_hi)) {
    const double next = k_lo + step;
    if (next > k_cap) {
      out.k_lower = k_lo;
      br.truncated = true;
      br.note = "branch did not collapse below k = " + std::to_string(k_cap);
      throw Error("detect_k0: " + br.note);
    }
    auto r = try_solve_reduced(current, next, omega, opts.newton);
    if (nontrivial(r) && on_branch(r->solution)) {
      current = r->solution;
      k_lo = next;
      br.points.push_back(reduced_point(next, current, omega, true));
      step = std::min(opts.ds, 2.0 * step);
      failures_at_min = 0;
    } else if (r && !nontrivial(r)) {
      k_hi = next;  // converged onto the collapsed branch
    } else if (step > min_step) {
      step *= 0.5;
    } else if (++failures_at_min < 2) {
      continue;
    } else {
      // Natural stepping is stuck; follow the branch by arclength instead.
      out.used_arclength = true;
      ArclengthOptions al;
      al.ds = min_step;
      al.newton = opts.newton;
      const Branch arc = continue_reduced_arclength(current, omega, k_lo, k_cap, opts.norm_floor, al);
      double k_fold = k_lo;
      for (std::size_t i = 1; i < arc.points.size(); ++i) {
        const auto& p = arc.points[i];
        if (p.l2_norm >= opts.norm_floor) {
          if (p.param_value > k_fold) {
            k_fold = p.param_value;
            current = std::get<ReducedAmplitudes>(p.solution);
            br.points.push_back(p);
          }
        } else {
          k_hi = p.param_value;
          break;
        }
      }
      k_lo = k_fold;
      if (std::isnan(k_hi)) {
        // Turning point without collapse: the fold is the end of the branch.
        out.k0 = k_fold;
        out.k_lower = k_fold;
        br.note = "branch folds without reaching the norm floor";
        return out;
      }
      if (k_hi < k_lo) std::swap(k_hi, k_lo);
    }
  }

  while (k_hi - k_lo > opts.k_tol) {
    const double mid = 0.5 * (k_lo + k_hi);
    auto r = try_solve_reduced(current, mid, omega, opts.newton);
    if (nontrivial(r) && on_branch(r->solution)) {
      current = r->solution;
      k_lo = mid;
      br.points.push_back(reduced_point(mid, current, omega, true));
    } else {
      k_hi = mid;
    }
  }

  auto end = try_solve_reduced(current, k_hi, omega, opts.newton);
  if (end) {
    br.points.push_back(reduced_point(k_hi, end->solution, omega, true));
  } else {
    br.points.push_back(reduced_point(k_hi, current, omega, false));
  }
  out.k0 = k_hi;
  out.k_lower = k_lo;
  return out;
}

LinearFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("line fit needs two or more (x, y) pairs");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("line fit needs distinct x values");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

K0Sweep sweep_k0_over_n(std::span<const std::size_t> ns, double omega, const K0Options& opts, unsigned threads) {
  for (auto n : ns) {
    if (n % 2 != 0) throw InvalidArgument("k0 sweep over N takes even ring sizes");
  }
  K0Sweep out;
  out.rows.resize(ns.size());
  detail::parallel_for(ns.size(), threads, [&](std::size_t i) {
    out.rows[i] = {ns[i], omega, detect_k0(ns[i], omega, opts).k0};
  });
  return out;
}

K0Sweep sweep_k0_over_omega(std::size_t n_sites, std::span<const double> omegas, const K0Options& opts,
                            unsigned threads) {
  if (n_sites % 2 != 0) throw InvalidArgument("k0 sweep over omega takes an even ring size");
  K0Sweep out;
  out.rows.resize(omegas.size());
  detail::parallel_for(omegas.size(), threads, [&](std::size_t i) {
    out.rows[i] = {n_sites, omegas[i], detect_k0(n_sites, omegas[i], opts).k0};
  });
  if (omegas.size() >= 2) {
    std::vector<double> ks;
    for (const auto& r : out.rows) ks.push_back(r.k0);
    out.fit = least_squares_line(omegas, ks);
  }
  return out;
}

}  // namespace twistring
