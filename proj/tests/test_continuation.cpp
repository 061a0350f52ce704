#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "golden_values.hpp"
#include "oracles.hpp"
#include "twistring/continuation.hpp"
#include "twistring/errors.hpp"

using namespace twistring;
using std::numbers::pi;

namespace {

LatticeConfig ring(std::size_t n, double k, double phi, double omega = 1.0) {
  LatticeConfig c;
  c.n_sites = n;
  c.couplings = CouplingProfile::uniform(k);
  c.twist = phi;
  c.omega = omega;
  return c;
}

}  // namespace

TEST_CASE("l2 norms of reduced seeds") {
  CHECK(l2_norm_reduced(reduced_ac_seed(6, 1.0)) == 1.0);
  CHECK(l2_norm_reduced(reduced_ac_seed(50, 4.0)) == 2.0);
  CHECK(l2_norm_reduced(ReducedAmplitudes(std::vector<double>(3, 0.0), 6)) == 0.0);
}

TEST_CASE("empty range gives a single-point branch") {
  const std::size_t one[] = {0};
  const auto cfg = ring(6, 0.0, 0.0);
  const Branch b = continue_natural(ac_seed(cfg, one), cfg, ContinuationParameter::coupling_k, 0.0, 0.0);
  REQUIRE(b.points.size() == 1);
  CHECK(b.points[0].converged);
  CHECK_FALSE(b.truncated);
}

TEST_CASE("k then phi continuation reproduces the N = 6 twisted solution") {
  const std::size_t one[] = {0};
  const TraceResult t = trace_from_ac(ring(6, 0.25, 0.25), one);
  REQUIRE(t.complete);
  CHECK(test::max_field_distance(test::gauge_fixed_field(t.endpoint),
                                 test::field_from_golden(golden::twist025_n6_re, golden::twist025_n6_im)) <= 1e-8);

  for (const Branch* b : {&t.coupling_leg, &t.twist_leg}) {
    std::vector<double> jumps;
    for (std::size_t i = 1; i < b->points.size(); ++i) {
      CHECK(b->points[i].param_value > b->points[i - 1].param_value);
      CHECK(b->points[i].residual_norm <= 1e-10);
      const auto& x = std::get<StandingWave>(b->points[i].solution);
      const auto& y = std::get<StandingWave>(b->points[i - 1].solution);
      double d = 0;
      const auto fx = test::gauge_fixed_field(x), fy = test::gauge_fixed_field(y);
      for (std::size_t j = 0; j < fx.size(); ++j) d += std::norm(fx[j] - fy[j]);
      jumps.push_back(std::sqrt(d) / (b->points[i].param_value - b->points[i - 1].param_value));
    }
    auto sorted = jumps;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    MESSAGE("l2 distance per unit step, median " << median);
    for (double j : jumps) CHECK(j <= 10 * median);
  }
}

TEST_CASE("N = 7 twisted solution has an equal minimum pair at nodes 4, 5") {
  const std::size_t one[] = {0};
  const TraceResult t = trace_from_ac(ring(7, 0.25, 0.25), one);
  REQUIRE(t.complete);
  const auto a = t.endpoint.amplitudes();
  const auto it = std::min_element(a.begin(), a.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
  const auto m = static_cast<std::size_t>(it - a.begin());
  CHECK((m == 3 || m == 4));
  CHECK(std::abs(std::abs(a[3]) - std::abs(a[4])) <= 1e-10);
  CHECK(test::max_field_distance(test::gauge_fixed_field(t.endpoint),
                                 test::field_from_golden(golden::twist025_n7_re, golden::twist025_n7_im)) <= 1e-8);
}

TEST_CASE("reduced branch: norm sqrt(omega) at k = 0, monotone decay, reconstruction residuals") {
  const Branch b = continue_reduced(reduced_ac_seed(10, 1.0), 1.0, 0.0, 0.5);
  REQUIRE(b.points.size() > 10);
  CHECK(b.points.front().l2_norm == 1.0);
  for (std::size_t i = 1; i < b.points.size(); ++i) {
    CHECK(b.points[i].l2_norm <= b.points[i - 1].l2_norm + 1e-9);
    const auto& a = std::get<ReducedAmplitudes>(b.points[i].solution);
    const auto cfg = ring(10, b.points[i].param_value, pi / 10);
    CHECK(residual(reconstruct_even(a, cfg), cfg).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("collapse onto zero truncates the branch") {
  // k0 for N = 6 is about 0.577; the branch cannot be continued to 1.0
  const Branch b = continue_reduced(reduced_ac_seed(6, 1.0), 1.0, 0.0, 1.0);
  CHECK(b.truncated);
  CHECK(b.points.back().param_value < test::k0_analytic(6, 1.0) + 1e-2);
}

TEST_CASE("phi scan: N = 6 dark node at pi/6, phi = 0 column is the untwisted solution") {
  const std::size_t one[] = {0};
  const double ks[] = {0.1, 0.25};
  const double phis[] = {0.0, pi / 12, pi / 6, pi / 4};
  const auto rows = scan_min_node_vs_phi(ring(6, 0.0, 0.0), ks, phis, one, {}, 2);
  REQUIRE(rows.size() == 8);
  for (const auto& r : rows) {
    CHECK(r.converged);
    CHECK(r.min_node == 3);
    if (r.phi == pi / 6) CHECK(r.min_amplitude <= 1e-10);
    if (r.phi == 0.0) {
      const auto t = trace_from_ac(ring(6, r.k, 0.0), one);
      CHECK(r.min_amplitude == doctest::Approx(std::abs(t.endpoint.amplitude(3))).epsilon(1e-10));
    }
  }
  // k = 0.4 is reached through the dark-node reduction instead (see below)
  const auto b = continue_reduced(reduced_ac_seed(6, 1.0), 1.0, 0.0, 0.4);
  REQUIRE_FALSE(b.truncated);
  const auto cfg = ring(6, 0.4, pi / 6);
  const StandingWave sw = reconstruct_even(std::get<ReducedAmplitudes>(b.points.back().solution), cfg);
  CHECK(sw.amplitude(3) == 0.0);
  CHECK(residual(sw, cfg).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("untwisted single-bright branch ends on the staggered wave at k = omega/(3 - cos(2pi/N))") {
  // Staggered wave a_n = (-1)^n sqrt(omega - 2k); its lowest nonuniform mode
  // goes soft at k = omega / (3 - cos(2pi/N)), which is 0.4 for N = 6.
  const std::size_t one[] = {0};
  const double kc = 1.0 / (3.0 - std::cos(2 * pi / 6));
  CHECK(kc == doctest::Approx(0.4).epsilon(1e-15));
  const auto below = trace_from_ac(ring(6, 0.3, 0.0), one);
  CHECK(std::abs(below.endpoint.amplitude(0)) > 0.8);
  const auto at = trace_from_ac(ring(6, kc, 0.0), one);
  for (double a : at.endpoint.amplitudes()) CHECK(std::abs(std::abs(a) - std::sqrt(1.0 - 2 * kc)) <= 1e-5);
}

TEST_CASE("k0 agrees with the analytic threshold") {
  for (std::size_t n : {6u, 10u}) {
    for (double omega : {1.0, 2.0}) {
      const K0Result r = detect_k0(n, omega);
      CHECK(r.k0 == doctest::Approx(test::k0_analytic(n, omega)).epsilon(1e-5));
      CHECK(r.k0 - r.k_lower <= 1e-6 + 1e-12);
      CHECK(r.branch.points.front().l2_norm == doctest::Approx(std::sqrt(omega)).epsilon(1e-15));
    }
  }
  CHECK_THROWS_AS(detect_k0(6, 0.0), InvalidArgument);
}

TEST_CASE("k0 over N increases toward omega/2 from above") {
  const std::size_t ns[] = {6, 10, 20, 50};
  const K0Sweep s = sweep_k0_over_n(ns, 1.0, {}, 2);
  REQUIRE(s.rows.size() == 4);
  CHECK_FALSE(s.fit.has_value());
  for (std::size_t i = 1; i < 4; ++i) CHECK(s.rows[i].k0 < s.rows[i - 1].k0);
  CHECK(s.rows.back().k0 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("omega sweeps: regression only for two or more values") {
  const double one[] = {1.0};
  const K0Sweep single = sweep_k0_over_omega(20, one);
  CHECK(single.rows.size() == 1);
  CHECK_FALSE(single.fit.has_value());

  const double omegas[] = {0.5, 1.0, 2.0};
  const K0Sweep s = sweep_k0_over_omega(20, omegas, {}, 3);
  REQUIRE(s.fit.has_value());
  CHECK(s.fit->slope == doctest::Approx(1.0 / (2 * std::cos(pi / 20))).epsilon(1e-5));
  CHECK(std::abs(s.fit->intercept) <= 1e-5);
}

TEST_CASE("least squares line") {
  const double x[] = {0, 1, 2, 3};
  const double y[] = {1, 3, 5, 7};
  const auto f = least_squares_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
}
