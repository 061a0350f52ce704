#include "twistring/seed_factory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "twistring/errors.hpp"

namespace twistring {

namespace {

constexpr double kTwistTolerance = 1e-14;

void require_dark_node_twist(const LatticeConfig& cfg, double expected, const char* what) {
  if (std::abs(cfg.twist - expected) > kTwistTolerance) {
    throw InvalidArgument(std::string(what) + ": twist " + std::to_string(cfg.twist) +
                          " is not the dark-node value " + std::to_string(expected));
  }
}

// Neighbour values of reduced unknown j under the boundary rules of each
// reduction. An index of -1 marks a neighbour pinned to zero.
struct Neighbours {
  double left = 0.0;
  double right = 0.0;
  std::ptrdiff_t left_index = -1;
  std::ptrdiff_t right_index = -1;
};

Neighbours reduced_neighbours(const std::vector<double>& x, std::size_t j, Parity parity) {
  const auto len = static_cast<std::ptrdiff_t>(x.size());
  const auto jj = static_cast<std::ptrdiff_t>(j);
  Neighbours nb;
  if (parity == Parity::even) {
    // a_N mirrors a_2 across the bright site; a_M is the dark node.
    nb.left_index = jj == 0 ? 1 : jj - 1;
    nb.right_index = jj + 1 < len ? jj + 1 : -1;
  } else {
    // a_1 is the dark node; a_{M+1} mirrors a_M.
    nb.left_index = jj == 0 ? -1 : jj - 1;
    nb.right_index = jj + 1 < len ? jj + 1 : len - 1;
  }
  if (nb.left_index >= 0) nb.left = x[static_cast<std::size_t>(nb.left_index)];
  if (nb.right_index >= 0) nb.right = x[static_cast<std::size_t>(nb.right_index)];
  return nb;
}

Eigen::VectorXd reduced_residual_impl(const ReducedAmplitudes& a, double k, double omega) {
  const auto& x = a.values();
  Eigen::VectorXd r(static_cast<Eigen::Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto nb = reduced_neighbours(x, j, a.parity());
    r[static_cast<Eigen::Index>(j)] = k * (nb.left + nb.right) + omega * x[j] - x[j] * x[j] * x[j];
  }
  return r;
}

}  // namespace

Parity parity_of(std::size_t n_sites) noexcept { return n_sites % 2 == 0 ? Parity::even : Parity::odd; }

std::size_t pivot_site_number(std::size_t n_sites) noexcept {
  return n_sites % 2 == 0 ? n_sites / 2 + 1 : (n_sites + 1) / 2;
}

std::size_t reduced_length(std::size_t n_sites) noexcept { return pivot_site_number(n_sites) - 1; }

ReducedAmplitudes::ReducedAmplitudes(std::vector<double> values, std::size_t n_sites)
    : values_(std::move(values)), n_sites_(n_sites) {
  if (n_sites_ < 3) throw InvalidArgument("reduced system needs a ring of at least 3 sites");
  if (values_.size() != reduced_length(n_sites_)) {
    throw DimensionError("reduced amplitudes: length " + std::to_string(values_.size()) + " but N = " +
                         std::to_string(n_sites_) + " needs " + std::to_string(reduced_length(n_sites_)));
  }
}

StandingWave ac_seed(const LatticeConfig& cfg, std::span<const std::size_t> excited,
                     std::span<const int> signs) {
  cfg.validate();
  if (!(cfg.omega > 0.0)) throw InvalidArgument("anti-continuum seed needs omega > 0");
  if (excited.empty()) throw InvalidArgument("anti-continuum seed needs at least one excited site");
  if (!signs.empty() && signs.size() != excited.size()) {
    throw DimensionError("anti-continuum seed: one sign per excited site expected");
  }
  std::vector<double> a(cfg.n_sites, 0.0);
  const double amp = std::sqrt(cfg.omega);
  for (std::size_t i = 0; i < excited.size(); ++i) {
    if (excited[i] >= cfg.n_sites) {
      throw InvalidArgument("excited site " + std::to_string(excited[i]) + " outside ring of " +
                            std::to_string(cfg.n_sites));
    }
    int s = signs.empty() ? 1 : signs[i];
    if (s != 1 && s != -1) throw InvalidArgument("seed signs must be +1 or -1");
    a[excited[i]] = s * amp;
  }
  return StandingWave(std::move(a), std::vector<double>(cfg.n_sites, 0.0));
}

ReducedAmplitudes reduced_ac_seed(std::size_t n_sites, double omega) {
  if (!(omega > 0.0)) throw InvalidArgument("reduced seed needs omega > 0");
  std::vector<double> x(reduced_length(n_sites), 0.0);
  if (parity_of(n_sites) == Parity::even) {
    x.front() = std::sqrt(omega);
  } else {
    x.back() = std::sqrt(omega);
  }
  return ReducedAmplitudes(std::move(x), n_sites);
}

Eigen::VectorXd reduced_residual_even(const ReducedAmplitudes& a, double k, double omega) {
  if (a.parity() != Parity::even) throw InvalidArgument("reduced_residual_even called with an odd ring");
  return reduced_residual_impl(a, k, omega);
}

Eigen::VectorXd reduced_residual_odd(const ReducedAmplitudes& a, double k, double omega) {
  if (a.parity() != Parity::odd) throw InvalidArgument("reduced_residual_odd called with an even ring");
  return reduced_residual_impl(a, k, omega);
}

Eigen::VectorXd reduced_residual(const ReducedAmplitudes& a, double k, double omega) {
  return reduced_residual_impl(a, k, omega);
}

Eigen::MatrixXd reduced_jacobian(const ReducedAmplitudes& a, double k, double omega) {
  const auto& x = a.values();
  const auto len = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(len, len);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    const auto nb = reduced_neighbours(x, j, a.parity());
    jac(row, row) += omega - 3.0 * x[j] * x[j];
    if (nb.left_index >= 0) jac(row, nb.left_index) += k;
    if (nb.right_index >= 0) jac(row, nb.right_index) += k;
  }
  return jac;
}

StandingWave reconstruct_even(const ReducedAmplitudes& a, const LatticeConfig& cfg) {
  const std::size_t n = cfg.n_sites;
  if (parity_of(n) != Parity::even || a.n_sites() != n) {
    throw InvalidArgument("reconstruct_even needs an even ring matching the reduced amplitudes");
  }
  require_dark_node_twist(cfg, std::numbers::pi / static_cast<double>(n), "reconstruct_even");
  const std::size_t m = pivot_site_number(n);  // 1-based dark site
  std::vector<double> amp(n, 0.0), th(n, 0.0);
  for (std::size_t s = 1; s <= m - 1; ++s) {
    amp[s - 1] = a.values()[s - 1];
    th[s - 1] = static_cast<double>(s - 1) * cfg.twist;
  }
  th[0] = 0.0;
  amp[m - 1] = 0.0;
  th[m - 1] = 0.0;
  for (std::size_t j = 1; j + 2 <= m; ++j) {
    amp[m + j - 1] = amp[m - j - 1];
    th[m + j - 1] = -th[m - j - 1];
  }
  return StandingWave(std::move(amp), std::move(th));
}

StandingWave reconstruct_odd(const ReducedAmplitudes& a, const LatticeConfig& cfg) {
  const std::size_t n = cfg.n_sites;
  if (parity_of(n) != Parity::odd || a.n_sites() != n) {
    throw InvalidArgument("reconstruct_odd needs an odd ring matching the reduced amplitudes");
  }
  require_dark_node_twist(cfg, std::numbers::pi / static_cast<double>(n), "reconstruct_odd");
  const std::size_t m = pivot_site_number(n);
  std::vector<double> amp(n, 0.0), th(n, 0.0);
  for (std::size_t s = 2; s <= m; ++s) {
    amp[s - 1] = a.values()[s - 2];
    th[s - 1] = static_cast<double>(s - 1) * cfg.twist - std::numbers::pi / 2;
  }
  for (std::size_t j = 1; j + 1 <= m; ++j) {
    amp[m + j - 1] = amp[m - j];
    th[m + j - 1] = -th[m - j];
  }
  return StandingWave(std::move(amp), std::move(th));
}

StandingWave reconstruct(const ReducedAmplitudes& a, const LatticeConfig& cfg) {
  return a.parity() == Parity::even ? reconstruct_even(a, cfg) : reconstruct_odd(a, cfg);
}

ReducedAmplitudes extract_reduced(const StandingWave& sw) {
  const std::size_t n = sw.size();
  const std::size_t len = reduced_length(n);
  const std::size_t first = parity_of(n) == Parity::even ? 0 : 1;
  std::vector<double> x(sw.amplitudes().begin() + static_cast<std::ptrdiff_t>(first),
                        sw.amplitudes().begin() + static_cast<std::ptrdiff_t>(first + len));
  return ReducedAmplitudes(std::move(x), n);
}

StandingWave splice_double_pulse(const StandingWave& half, const LatticeConfig& cfg) {
  const std::size_t n = cfg.n_sites;
  if (n % 4 != 0) throw InvalidArgument("double pulse splicing needs N divisible by 4");
  if (half.size() * 2 != n) throw DimensionError("double pulse splicing: half state must have N/2 sites");
  require_dark_node_twist(cfg, 2.0 * std::numbers::pi / static_cast<double>(n), "splice_double_pulse");
  std::vector<double> amp = half.amplitudes();
  std::vector<double> th = half.phases();
  amp.insert(amp.end(), half.amplitudes().begin(), half.amplitudes().end());
  th.insert(th.end(), half.phases().begin(), half.phases().end());
  return StandingWave(std::move(amp), std::move(th));
}

SymmetryDefect symmetry_defect(const StandingWave& sw, double dark_tol) {
  SymmetryDefect d;
  const std::size_t n = sw.size();
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mirror = n - i;
    d.amplitude = std::max(d.amplitude, std::abs(sw.amplitude(i) - sw.amplitude(mirror)));
    if (std::abs(sw.amplitude(i)) > dark_tol && std::abs(sw.amplitude(mirror)) > dark_tol) {
      d.phase = std::max(d.phase, std::abs(wrap_phase(sw.phase(i) + sw.phase(mirror))));
    }
  }
  return d;
}

}  // namespace twistring
