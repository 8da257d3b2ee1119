#include <doctest.h>

#include <cmath>
#include <vector>

#include "landau/degiorgi.hpp"
#include "landau/grid.hpp"
#include "landau/test_fields.hpp"

using namespace landau;

TEST_CASE("ladders follow the dyadic closed forms") {
  const Ladders lad = ladders(8.0, 0.5, 4);
  REQUIRE(lad.levels.size() == 5);
  REQUIRE(lad.times.size() == 5);
  for (int n = 0; n <= 4; ++n) {
    CHECK(lad.levels[n] == doctest::Approx(8.0 * (1.0 - std::pow(2.0, -n))).epsilon(1e-15));
    CHECK(lad.times[n] ==
          doctest::Approx(0.5 * (1.0 - std::pow(2.0, -n - 1))).epsilon(1e-15));
  }
  CHECK(lad.levels.front() == 0.0);
  CHECK(lad.times.front() == doctest::Approx(0.25));
  CHECK_THROWS(ladders(-1.0, 0.5, 4));
  CHECK_THROWS(ladders(1.0, 0.0, 4));
}

TEST_CASE("mu exponent closed form") {
  // (2s - gamma d (p-1)) / (2p)
  CHECK(mu_exponent(3.0, 2.0, -1.0, 3) == doctest::Approx(9.0 / 4.0).epsilon(1e-15));
  CHECK(mu_exponent(4.0, 2.0, -2.0, 3) == doctest::Approx(14.0 / 4.0).epsilon(1e-15));
  CHECK(mu_exponent(2.0, 3.0, -0.5, 2) == doctest::Approx(7.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("geometric decay ratio hits the hand-computed powers of two") {
  // gamma = -1, d = 3, s = 3, p = 2: the three dyadic exponents are
  //   (d+4)/2 = 3.5,
  //   (4s + d(gamma+s))/(2s + d gamma) = 18/3 = 6,
  //   (2d - (d-4)p)/(d - (d-2)p) = 8/1 = 8,
  // so Q = 2^8 = 256.
  CHECK(compute_Q(3, -1.0, 3.0, 2.0) == doctest::Approx(256.0).epsilon(1e-13));
  // gamma = -2, d = 3, s = 4, alpha = 3/4: exponents 2, 22/2 = 11, 1.5/0.5 = 3,
  // so Q = 2^11 = 2048.
  CHECK(compute_Q(3, -2.0, 4.0, 0.75) == doctest::Approx(2048.0).epsilon(1e-13));

  // admissibility gates
  CHECK_THROWS(compute_Q(3, -1.0, 1.0, 2.0));    // s <= (d/2)|gamma|
  CHECK_THROWS(compute_Q(3, -1.0, 3.0, 1.2));    // p below d/(d+gamma)
  CHECK_THROWS(compute_Q(3, -1.0, 3.0, 3.2));    // p above min(3, d/(d-2))
  CHECK_THROWS(compute_Q(3, -2.0, 2.5, 0.75));   // critical branch needs s > d
  CHECK_THROWS(compute_Q(3, -2.0, 4.0, 0.4));    // alpha outside (1/2, 1)
}

TEST_CASE("level threshold formula anchors and scalings") {
  // with y_s = 1, C = 1/3, t_star = 1, E0 = 1 every factor collapses to 1
  const KFormula unit = compute_K(3, -1.0, 3.0, 2.0, 1.0, 1.0, 1.0, 1.0 / 3.0);
  CHECK(unit.K1 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(unit.K2 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(unit.K3 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(unit.K == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(unit.K_sum == doctest::Approx(3.0).epsilon(1e-13));

  // same anchor, E0 = 4: K1 = 4^{1/3} (theta1 = 1, E0-power 1/3),
  // K2 = (4^{1/6})^3 = 2, K3 = (4^{2/3})^{3/4} = 2
  const KFormula four = compute_K(3, -1.0, 3.0, 2.0, 1.0, 4.0, 1.0, 1.0 / 3.0);
  CHECK(four.K1 == doctest::Approx(std::cbrt(4.0)).epsilon(1e-13));
  CHECK(four.K2 == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(four.K3 == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(four.K == doctest::Approx(2.0).epsilon(1e-13));

  // K1 scales like t_star^{-1/theta1}; K2, K3 ignore t_star
  const KFormula late = compute_K(3, -1.0, 3.0, 2.0, 2.0, 4.0, 1.0, 1.0 / 3.0);
  CHECK(late.K1 == doctest::Approx(0.5 * four.K1).epsilon(1e-13));
  CHECK(late.K2 == doctest::Approx(four.K2).epsilon(1e-13));
  CHECK(late.K3 == doctest::Approx(four.K3).epsilon(1e-13));

  // vanishing initial energy kills every rung
  const KFormula dead = compute_K(3, -1.0, 3.0, 2.0, 0.5, 0.0, 2.0, 1.0);
  CHECK(dead.K == 0.0);
  CHECK(dead.K1 == 0.0);
  CHECK(dead.K_sum == 0.0);

  CHECK_THROWS(compute_K(3, -1.0, 3.0, 2.0, 0.0, 1.0, 1.0, 1.0));  // t_star > 0
  CHECK_THROWS(compute_K(3, -1.0, 3.0, 2.0, 0.5, 1.0, 1.0, 0.0));  // C > 0
}

namespace {

// Constant-in-time spike series: every De Giorgi ingredient has a closed form.
struct SpikeSeries {
  std::vector<ScalarField> snaps;
  SnapshotSeries series;
  double height = 1.5;

  explicit SpikeSeries(const GridSpec& g, int count = 33, double t_end = 1.0) {
    snaps.reserve(count);
    for (int i = 0; i < count; ++i) {
      ScalarField f = make_scalar(g);
      f.v[g.flat({g.n / 2, g.n / 2, g.n / 2})] = height;
      snaps.push_back(std::move(f));
    }
    for (int i = 0; i < count; ++i) {
      series.times.push_back(t_end * i / (count - 1));
      series.fields.push_back(&snaps[i]);
    }
  }
};

}  // namespace

TEST_CASE("iterate on a constant spike: sup, bisection, and a dead ladder") {
  const GridSpec g = make_grid(3, 8, 2.0);
  SpikeSeries s(g);

  DeGiorgiConfig cfg;
  cfg.gamma = -1.0;
  cfg.s = 3.0;
  cfg.p_gamma = 2.0;
  cfg.t_star = 0.5;
  cfg.T = 1.0;
  cfg.n_max = 6;
  cfg.c0 = 0.25;
  cfg.K = 2.0 * s.height;  // level 1 already exceeds the spike

  const DeGiorgiTrace tr = iterate(s.series, cfg);
  CHECK(tr.Q == doctest::Approx(256.0).epsilon(1e-13));
  CHECK(tr.sup_f == doctest::Approx(s.height).epsilon(1e-15));
  CHECK(tr.E0 > 0.0);
  // rung 0 equals E0 (same window, zero level); all higher rungs truncate
  // above the spike height, so they vanish and the ladder decays trivially
  CHECK(tr.E[0] == doctest::Approx(tr.E0).epsilon(1e-12));
  for (std::size_t n = 1; n < tr.E.size(); ++n) CHECK(tr.E[n] == 0.0);
  CHECK(tr.decay_pass);
  CHECK(tr.decay_violations == 0);
  // the smallest cap killing the top rung satisfies K (1 - 2^{-n_max}) ~ height
  CHECK(tr.K_bisect * (1.0 - std::pow(2.0, -cfg.n_max)) ==
        doctest::Approx(s.height).epsilon(2e-3));

  // validation gates
  DeGiorgiConfig bad = cfg;
  bad.t_star = 1.5;
  CHECK_THROWS(iterate(s.series, bad));
  bad = cfg;
  bad.c0 = 0.0;
  CHECK_THROWS(iterate(s.series, bad));
  bad = cfg;
  bad.gamma = -2.0;
  bad.s = 4.0;
  bad.alpha = 0.9;  // inconsistent with the tie 1/(1-alpha) = s
  CHECK_THROWS(iterate(s.series, bad));
  SnapshotSeries empty;
  CHECK_THROWS(iterate(empty, cfg));
}

TEST_CASE("critical branch derives alpha from the moment tie") {
  const GridSpec g = make_grid(3, 8, 2.0);
  SpikeSeries s(g);
  DeGiorgiConfig cfg;
  cfg.gamma = -2.0;
  cfg.s = 4.0;
  cfg.alpha = 0.0;  // <= 0 requests alpha = 1 - 1/s = 3/4
  cfg.t_star = 0.5;
  cfg.T = 1.0;
  cfg.n_max = 5;
  cfg.c0 = 0.25;
  cfg.K = 2.0 * s.height;
  const DeGiorgiTrace tr = iterate(s.series, cfg);
  CHECK(tr.Q == doctest::Approx(2048.0).epsilon(1e-13));
  CHECK(tr.decay_pass);
}

TEST_CASE("back-solved constant is minimal for ladder decay") {
  const GridSpec g = make_grid(3, 8, 2.0);
  SpikeSeries s(g);
  DeGiorgiConfig cfg;
  cfg.gamma = -1.0;
  cfg.s = 3.0;
  cfg.p_gamma = 2.0;
  cfg.t_star = 0.5;
  cfg.T = 1.0;
  cfg.n_max = 5;
  cfg.c0 = 0.25;
  cfg.K = 0.0;  // formula mode

  const double C = back_solve_C(s.series, cfg);
  REQUIRE(C > 2e-6);  // interior of the bisection range, so C/2 must sit below lo

  DeGiorgiConfig at = cfg;
  at.C_empirical = C;
  CHECK(iterate(s.series, at).decay_pass);
  DeGiorgiConfig below = cfg;
  below.C_empirical = C / 2.0;
  CHECK_FALSE(iterate(s.series, below).decay_pass);
}
