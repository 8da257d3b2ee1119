#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "landau/grid.hpp"
#include "landau/lorentz.hpp"
#include "landau/test_fields.hpp"

using namespace landau;

namespace {

ScalarField random_envelope_field(const GridSpec& g, std::uint64_t seed) {
  fields::Rng rng(seed);
  const ScalarField env = fields::gaussian(g, {0.2, -0.3, 0.1}, 1.4);
  ScalarField f = make_scalar(g);
  for (std::int64_t id = 0; id < g.cells; ++id) f.v[id] = env.v[id] * rng.normal();
  return f;
}

double lp_norm(const ScalarField& f, double p) {
  double acc = 0.0;
  for (double v : f.v) acc += std::pow(std::abs(v), p);
  return std::pow(acc * f.grid.cell_volume(), 1.0 / p);
}

}  // namespace

TEST_CASE("distribution and rearrangement are exact step functions") {
  const GridSpec g = make_grid(2, 4, 1.0);  // 16 cells, h = 0.5, cell area 0.25
  ScalarField f = make_scalar(g);
  f.v[3] = 3.0;
  f.v[7] = -1.0;
  f.v[11] = 1.0;  // |f| values: one 3, two 1, rest 0

  const StepFunction d = distribution(f);
  // d(s) = 0.75 for s < 1, 0.25 for 1 <= s < 3, 0 beyond
  CHECK(d.value(0.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(d.value(0.5) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(d.value(1.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(d.value(2.999) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(d.value(3.0) == 0.0);

  const StepFunction r = rearrangement(f);
  // f*(t) = 3 on [0, 0.25), 1 on [0.25, 0.75), 0 beyond
  CHECK(r.value(0.0) == 3.0);
  CHECK(r.value(0.24) == 3.0);
  CHECK(r.value(0.25) == 1.0);
  CHECK(r.value(0.74) == 1.0);
  CHECK(r.value(0.75) == 0.0);
  CHECK(r.support() == doctest::Approx(0.75).epsilon(1e-15));

  // equimeasurability is exact: the induced distribution equals d breakpoint
  // by breakpoint
  const StepFunction d2 = distribution_of(r);
  REQUIRE(d2.t.size() == d.t.size());
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    CHECK(d2.t[i] == doctest::Approx(d.t[i]).epsilon(1e-15));
    CHECK(d2.y[i] == doctest::Approx(d.y[i]).epsilon(1e-15));
  }
}

TEST_CASE("Lorentz norm of an indicator matches (p/q)^{1/q} m^{1/p}") {
  const GridSpec g = make_grid(3, 8, 2.0);
  ScalarField f = make_scalar(g);
  const int cells_on = 37;
  for (int i = 0; i < cells_on; ++i) f.v[7 * i] = 2.5;  // 37 distinct cells
  const double m = cells_on * g.cell_volume();
  for (double p : {1.0, 1.5, 2.0, 4.0}) {
    for (double q : {1.0, 2.0, 3.0}) {
      const double want = 2.5 * std::pow(p / q, 1.0 / q) * std::pow(m, 1.0 / p);
      CHECK(lorentz_norm(f, p, q) == doctest::Approx(want).epsilon(1e-13));
    }
    // q = inf: sup_t t^{1/p} f*(t) = c m^{1/p}
    const double inf_q = std::numeric_limits<double>::infinity();
    CHECK(lorentz_norm(f, p, inf_q) ==
          doctest::Approx(2.5 * std::pow(m, 1.0 / p)).epsilon(1e-13));
  }
}

TEST_CASE("diagonal Lorentz norm equals the Lebesgue norm") {
  const GridSpec g = make_grid(3, 12, 3.0);
  const ScalarField f = random_envelope_field(g, 42);
  for (double p : {1.0, 1.5, 2.0, 3.0})
    CHECK(lorentz_norm(f, p, p) == doctest::Approx(lp_norm(f, p)).epsilon(1e-12));
  // p = q = inf: the sup norm
  const double inf = std::numeric_limits<double>::infinity();
  double sup = 0.0;
  for (double v : f.v) sup = std::max(sup, std::abs(v));
  CHECK(lorentz_norm(f, inf, inf) == doctest::Approx(sup).epsilon(1e-14));
  // p = inf with q < inf diverges on nonzero data
  CHECK(std::isinf(lorentz_norm(f, inf, 2.0)));
}

TEST_CASE("rearrangement and distribution forms of the norm agree") {
  const GridSpec g = make_grid(3, 12, 3.0);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const ScalarField f = random_envelope_field(g, seed);
    for (double p : {1.5, 2.0, 2.25}) {
      for (double q : {1.0, 2.0, 4.0}) {
        const double a = lorentz_norm(f, p, q);
        const double b = lorentz_norm_via_distribution(f, p, q);
        CHECK(std::abs(a - b) <= 1e-10 * std::max(a, 1e-30));
      }
    }
  }
  CHECK_THROWS(lorentz_norm(random_envelope_field(g, 9), 0.5, 2.0));  // p < 1
}

TEST_CASE("Riesz potential equals the direct regularized double sum") {
  const GridSpec g = make_grid(3, 8, 2.0);
  const ScalarField f = fields::gaussian(g, {0.4, -0.2, 0.3}, 0.8);
  for (double alpha : {1.0, 1.5, 2.0}) {
    const ScalarField fast = riesz_potential(f, alpha);
    const double rho = equal_volume_ball_radius(g);
    const double origin = (3.0 / alpha) * std::pow(rho, alpha - 3.0);
    double worst = 0.0, scale = 0.0;
    for (std::int64_t i = 0; i < g.cells; ++i) {
      const auto vi = g.node(i);
      double acc = 0.0;
      for (std::int64_t j = 0; j < g.cells; ++j) {
        const auto vj = g.node(j);
        const double r2 = (vi[0] - vj[0]) * (vi[0] - vj[0]) +
                          (vi[1] - vj[1]) * (vi[1] - vj[1]) +
                          (vi[2] - vj[2]) * (vi[2] - vj[2]);
        const double k = r2 > 0.0 ? std::pow(std::sqrt(r2), alpha - 3.0) : origin;
        acc += k * f.v[j];
      }
      acc *= g.cell_volume();
      worst = std::max(worst, std::abs(acc - fast.v[i]));
      scale = std::max(scale, std::abs(acc));
    }
    CHECK(worst <= 1e-12 * scale);
  }
  CHECK_THROWS(riesz_potential(f, 0.0));
  CHECK_THROWS(riesz_potential(f, 3.0));
}

TEST_CASE("Hoelder ratio in Lorentz pairing stays at or below one") {
  const GridSpec g = make_grid(3, 12, 3.0);
  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    const ScalarField f = random_envelope_field(g, seed);
    const ScalarField h = random_envelope_field(g, seed + 100);
    for (double p : {1.5, 2.0, 3.0}) {
      for (double q : {1.5, 2.0}) {
        const double r = holder_lorentz_ratio(f, h, p, q);
        CHECK(r <= 1.0 + 1e-12);
        CHECK(r >= 0.0);
      }
    }
  }
}

TEST_CASE("interpolation ratio is at most one and exactly one on indicators") {
  const GridSpec g = make_grid(3, 12, 3.0);
  // indicators are the extremal case: ratio = 1
  ScalarField ind = make_scalar(g);
  for (std::int64_t id = 0; id < 200; ++id) ind.v[id * 5 % g.cells] = 1.7;
  for (double q : {1.0, 2.0}) {
    const double r = interpolation_ratio(ind, 2.0, q, 1.5, 3.0);
    CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (std::uint64_t seed : {21ull, 22ull}) {
    const ScalarField f = random_envelope_field(g, seed);
    CHECK(interpolation_ratio(f, 2.0, 2.0, 1.25, 4.0) <= 1.0 + 1e-12);
    CHECK(interpolation_ratio(f, 1.8, 1.0, 1.0, 2.5) <= 1.0 + 1e-12);
  }
  CHECK_THROWS(interpolation_ratio(ind, 1.2, 2.0, 1.5, 3.0));  // p outside (p1, p2)
}

TEST_CASE("Sobolev-Lorentz ratio is width-stable on Gaussians") {
  // scaling-invariant pairing: ||f||_{q*,q} / ||grad f||_q is independent of
  // the Gaussian width up to discretization error
  const GridSpec g = make_grid(3, 32, 8.0);
  const double q = 2.0;
  std::vector<double> ratios;
  for (double w : {0.8, 1.1, 1.5})
    ratios.push_back(sobolev_lorentz_ratio(fields::gaussian(g, {0.0, 0.0, 0.0}, w), q));
  const double lo = std::min({ratios[0], ratios[1], ratios[2]});
  const double hi = std::max({ratios[0], ratios[1], ratios[2]});
  CHECK(lo > 0.0);
  CHECK((hi - lo) / hi < 0.02);
  CHECK_THROWS(sobolev_lorentz_ratio(fields::gaussian(g, {0.0, 0.0, 0.0}, 1.0), 3.0));  // q < d
}
