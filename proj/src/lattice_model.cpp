#include "twistring/lattice_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "twistring/errors.hpp"

namespace twistring {

namespace {

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": length " + std::to_string(got) +
                         " does not match lattice size " + std::to_string(want));
  }
}

}  // namespace

CouplingProfile CouplingProfile::uniform(double k) { return CouplingProfile(UniformCoupling{k}); }

CouplingProfile CouplingProfile::per_edge(std::vector<double> k) {
  return CouplingProfile(PerEdgeCoupling{std::move(k)});
}

CouplingProfile CouplingProfile::per_bond(std::vector<double> k) {
  return CouplingProfile(PerBondCoupling{std::move(k)});
}

double CouplingProfile::at(std::size_t i) const {
  if (const auto* u = std::get_if<UniformCoupling>(&value_)) return u->k;
  if (const auto* e = std::get_if<PerEdgeCoupling>(&value_)) return e->k.at(i);
  return std::get<PerBondCoupling>(value_).k.at(i);
}

std::vector<double> CouplingProfile::expand(std::size_t n_sites) const {
  if (const auto* u = std::get_if<UniformCoupling>(&value_)) return std::vector<double>(n_sites, u->k);
  const auto& k = is_per_edge() ? std::get<PerEdgeCoupling>(value_).k : std::get<PerBondCoupling>(value_).k;
  require_size(k.size(), n_sites, "coupling profile");
  return k;
}

Hopping CouplingProfile::hopping(std::size_t n) const {
  const auto k = expand(n);
  Hopping h{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t p = (i + 1) % n;
    const std::size_t m = (i + n - 1) % n;
    if (is_per_bond()) {
      h.forward[i] = k[i];
      h.backward[i] = k[m];
    } else {
      h.forward[i] = k[p];
      h.backward[i] = k[m];
    }
  }
  return h;
}

CouplingProfile CouplingProfile::scaled(double factor) const {
  if (const auto* u = std::get_if<UniformCoupling>(&value_)) return uniform(factor * u->k);
  auto k = is_per_edge() ? std::get<PerEdgeCoupling>(value_).k : std::get<PerBondCoupling>(value_).k;
  for (auto& x : k) x *= factor;
  return is_per_edge() ? per_edge(std::move(k)) : per_bond(std::move(k));
}

bool operator==(const CouplingProfile& a, const CouplingProfile& b) {
  if (a.value_.index() != b.value_.index()) return false;
  if (a.is_uniform()) return std::get<UniformCoupling>(a.value_).k == std::get<UniformCoupling>(b.value_).k;
  if (a.is_per_edge()) return std::get<PerEdgeCoupling>(a.value_).k == std::get<PerEdgeCoupling>(b.value_).k;
  return std::get<PerBondCoupling>(a.value_).k == std::get<PerBondCoupling>(b.value_).k;
}

void LatticeConfig::validate() const {
  if (n_sites < 3) throw InvalidArgument("ring needs at least 3 sites, got " + std::to_string(n_sites));
  for (double k : couplings.expand(n_sites)) {
    if (!std::isfinite(k)) throw InvalidArgument("coupling values must be finite");
  }
  if (!std::isfinite(twist)) throw InvalidArgument("twist must be finite");
  if (!std::isfinite(omega)) throw InvalidArgument("omega must be finite");
}

LatticeConfig LatticeConfig::with_couplings(CouplingProfile c) const {
  LatticeConfig out = *this;
  out.couplings = std::move(c);
  return out;
}

LatticeConfig LatticeConfig::with_twist(double phi) const {
  LatticeConfig out = *this;
  out.twist = phi;
  return out;
}

double wrap_phase(double theta) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(theta, two_pi);  // [-pi, pi]
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

StandingWave::StandingWave(std::vector<double> amplitudes, std::vector<double> phases)
    : amplitudes_(std::move(amplitudes)), phases_(std::move(phases)) {
  if (amplitudes_.size() != phases_.size()) {
    throw DimensionError("standing wave: " + std::to_string(amplitudes_.size()) + " amplitudes but " +
                         std::to_string(phases_.size()) + " phases");
  }
  if (phases_.empty()) return;
  const double gauge = phases_.front();
  for (auto& t : phases_) t = wrap_phase(t - gauge);
  phases_.front() = 0.0;
}

StandingWave StandingWave::zero(std::size_t n_sites) {
  return StandingWave(std::vector<double>(n_sites, 0.0), std::vector<double>(n_sites, 0.0));
}

StandingWave half_plane_normalized(const StandingWave& sw) {
  auto a = sw.amplitudes();
  auto t = sw.phases();
  constexpr double half_pi = std::numbers::pi / 2;
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (t[n] > half_pi || t[n] <= -half_pi) {
      a[n] = -a[n];
      t[n] = wrap_phase(t[n] + std::numbers::pi);
      if (t[n] <= -half_pi) t[n] += std::numbers::pi;  // exact -pi/2 after rounding
    }
  }
  return StandingWave(std::move(a), std::move(t));
}

Eigen::VectorXd residual(const StandingWave& sw, const LatticeConfig& cfg) {
  const std::size_t n = cfg.n_sites;
  require_size(sw.size(), n, "standing wave");
  const Hopping h = cfg.couplings.hopping(n);
  const auto& kp = h.forward;
  const auto& km = h.backward;
  const auto& a = sw.amplitudes();
  const auto& th = sw.phases();
  const double g = cubic_sign(cfg.nonlinearity);

  Eigen::VectorXd r(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t p = (i + 1) % n;
    const std::size_t m = (i + n - 1) % n;
    const double dp = th[p] - th[i] - cfg.twist;
    const double dm = th[m] - th[i] + cfg.twist;
    r[2 * i] = kp[i] * a[p] * std::cos(dp) + km[i] * a[m] * std::cos(dm) + cfg.omega * a[i] +
               g * a[i] * a[i] * a[i];
    r[2 * i + 1] = kp[i] * a[p] * std::sin(dp) + km[i] * a[m] * std::sin(dm);
  }
  return r;
}

Eigen::MatrixXd jacobian(const StandingWave& sw, const LatticeConfig& cfg) {
  const std::size_t n = cfg.n_sites;
  require_size(sw.size(), n, "standing wave");
  const Hopping h = cfg.couplings.hopping(n);
  const auto& kp = h.forward;
  const auto& km = h.backward;
  const auto& a = sw.amplitudes();
  const auto& th = sw.phases();
  const double g = cubic_sign(cfg.nonlinearity);

  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  auto amp = [](std::size_t s) { return static_cast<Eigen::Index>(2 * s); };
  auto phs = [](std::size_t s) { return static_cast<Eigen::Index>(2 * s + 1); };

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t p = (i + 1) % n;
    const std::size_t m = (i + n - 1) % n;
    const double dp = th[p] - th[i] - cfg.twist;
    const double dm = th[m] - th[i] + cfg.twist;
    const double cp = std::cos(dp), sp = std::sin(dp);
    const double cm = std::cos(dm), sm = std::sin(dm);
    const auto re = static_cast<Eigen::Index>(2 * i);
    const auto im = re + 1;

    jac(re, amp(i)) += cfg.omega + 3.0 * g * a[i] * a[i];
    jac(re, amp(p)) += kp[i] * cp;
    jac(re, amp(m)) += km[i] * cm;
    jac(re, phs(p)) += -kp[i] * a[p] * sp;
    jac(re, phs(m)) += -km[i] * a[m] * sm;
    jac(re, phs(i)) += kp[i] * a[p] * sp + km[i] * a[m] * sm;

    jac(im, amp(p)) += kp[i] * sp;
    jac(im, amp(m)) += km[i] * sm;
    jac(im, phs(p)) += kp[i] * a[p] * cp;
    jac(im, phs(m)) += km[i] * a[m] * cm;
    jac(im, phs(i)) += -(kp[i] * a[p] * cp + km[i] * a[m] * cm);
  }
  return jac;
}

void evolution_rhs(std::span<const Complex> c, const LatticeConfig& cfg, const Hopping& h,
                   std::span<Complex> out) {
  const std::size_t n = c.size();
  const Complex fwd = std::polar(1.0, -cfg.twist);
  const Complex bwd = std::polar(1.0, cfg.twist);
  const double g = cubic_sign(cfg.nonlinearity);
  constexpr Complex minus_i{0.0, -1.0};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t p = (i + 1) % n;
    const std::size_t m = (i + n - 1) % n;
    const Complex rhs = h.forward[i] * fwd * c[p] + h.backward[i] * bwd * c[m] + g * std::norm(c[i]) * c[i];
    out[i] = minus_i * rhs;
  }
}

ComplexState evolution_rhs(const ComplexState& c, const LatticeConfig& cfg) {
  require_size(c.size(), cfg.n_sites, "complex state");
  const Hopping h = cfg.couplings.hopping(cfg.n_sites);
  ComplexState out{std::vector<Complex>(c.size())};
  evolution_rhs(c.values, cfg, h, out.values);
  return out;
}

double hamiltonian(const ComplexState& c, const LatticeConfig& cfg) {
  if (cfg.couplings.is_per_edge()) {
    throw UnsupportedConfiguration("hamiltonian is not defined for per-site coupling profiles");
  }
  const std::size_t n = cfg.n_sites;
  require_size(c.size(), n, "complex state");
  const Hopping hop = cfg.couplings.hopping(n);
  const double g = cubic_sign(cfg.nonlinearity);
  const Complex fwd = std::polar(1.0, -cfg.twist);
  Complex h = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex& ci = c.values[i];
    const Complex& cp = c.values[(i + 1) % n];
    // the pair is conjugate-symmetric, so its imaginary parts cancel
    h += hop.forward[i] * (cp * std::conj(ci) * fwd + ci * std::conj(cp) * std::conj(fwd));
    h += 0.5 * g * std::norm(ci) * std::norm(ci);
  }
  return h.real();
}

double power(const ComplexState& c) {
  double p = 0.0;
  for (const auto& x : c.values) p += std::norm(x);
  return p;
}

double conserved_power(const ComplexState& c, const LatticeConfig& cfg) {
  require_size(c.size(), cfg.n_sites, "complex state");
  if (!cfg.couplings.is_per_edge()) return power(c);
  const auto k = cfg.couplings.expand(cfg.n_sites);
  double p = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) p += k[i] * std::norm(c.values[i]);
  return p;
}

ComplexState gauge_rotate(const ComplexState& c, double theta) {
  const Complex f = std::polar(1.0, theta);
  ComplexState out = c;
  for (auto& x : out.values) x *= f;
  return out;
}

ComplexState to_complex(const StandingWave& sw, double z, const LatticeConfig& cfg) {
  require_size(sw.size(), cfg.n_sites, "standing wave");
  ComplexState out{std::vector<Complex>(sw.size())};
  for (std::size_t i = 0; i < sw.size(); ++i) {
    out.values[i] = std::polar(1.0, cfg.omega * z + sw.phase(i)) * sw.amplitude(i);
  }
  return out;
}

StandingWave from_complex(const ComplexState& c) {
  std::vector<double> a(c.size()), t(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    a[i] = std::abs(c.values[i]);
    t[i] = std::arg(c.values[i]);
  }
  return StandingWave(std::move(a), std::move(t));
}

}  // namespace twistring
