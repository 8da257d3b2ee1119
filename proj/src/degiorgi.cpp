#include "landau/degiorgi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace landau {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_critical(double gamma) { return std::abs(gamma + 2.0) < 1e-12; }

void require_branch_params(int d, double gamma, double s, double p_or_alpha) {
  if (d < 2) throw std::invalid_argument("dimension must be >= 2");
  if (is_critical(gamma)) {
    if (!(s > static_cast<double>(d)))
      throw std::invalid_argument("gamma = -2 branch needs moment order s > d");
    if (!(p_or_alpha > 0.5 && p_or_alpha < 1.0))
      throw std::invalid_argument("alpha must lie in (1/2, 1)");
    return;
  }
  if (!(gamma > -2.0 && gamma < 0.0))
    throw std::invalid_argument("gamma must lie in [-2, 0)");
  if (!(s > 0.5 * d * (-gamma)))
    throw std::invalid_argument("moment order s must exceed (d/2)|gamma|");
  const double p = p_or_alpha;
  double p_hi = 3.0;
  if (d > 2) p_hi = std::min(p_hi, static_cast<double>(d) / (d - 2));
  if (!(p > static_cast<double>(d) / (d + gamma) && p < p_hi))
    throw std::invalid_argument("p_gamma outside the admissible interval");
}

// E0-independent sanity shared by iterate/back_solve.
void require_config(const SnapshotSeries& series, const DeGiorgiConfig& cfg) {
  if (series.fields.empty() || series.fields.size() != series.times.size())
    throw std::invalid_argument("snapshot series is empty or inconsistent");
  if (!(cfg.t_star > 0.0 && cfg.t_star < cfg.T))
    throw std::invalid_argument("need 0 < t_star < T");
  if (cfg.n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (!(cfg.c0 > 0.0)) throw std::invalid_argument("coercivity constant c0 must be > 0");
}

double resolve_alpha(const DeGiorgiConfig& cfg) {
  if (!is_critical(cfg.gamma)) return cfg.p_gamma;
  double a = cfg.alpha;
  if (a <= 0.0) a = 1.0 - 1.0 / cfg.s;  // tie 1/(1-alpha) = s
  if (std::abs(1.0 / (1.0 - a) - cfg.s) > 1e-9 * cfg.s)
    throw std::invalid_argument("alpha must satisfy 1/(1-alpha) = s (or be <= 0 to derive it)");
  return a;
}

struct LadderEnergies {
  Ladders lad;
  std::vector<double> E;
};

LadderEnergies measure_ladder(const SnapshotSeries& series, const DeGiorgiConfig& cfg, double K) {
  LadderEnergies out;
  out.lad = ladders(K, cfg.t_star, cfg.n_max);
  out.E.resize(out.lad.levels.size());
  for (std::size_t n = 0; n < out.lad.levels.size(); ++n)
    out.E[n] =
        energy_functional(series, out.lad.levels[n], out.lad.times[n], cfg.T, cfg.c0, cfg.gamma);
  return out;
}

// Decay verdict against E0 Q^{-n}; one violation at n_max is tolerated but flagged.
void check_decay(const std::vector<double>& E, const std::vector<double>& target, int n_max,
                 DeGiorgiTrace& tr) {
  tr.decay_violations = 0;
  tr.flagged_n = -1;
  for (std::size_t n = 0; n < E.size(); ++n) {
    if (E[n] <= target[n] * (1.0 + 1e-9) + 1e-300) continue;
    ++tr.decay_violations;
    tr.flagged_n = static_cast<int>(n);
  }
  tr.decay_pass = tr.decay_violations == 0 ||
                  (tr.decay_violations == 1 && tr.flagged_n == n_max);
}

}  // namespace

Ladders ladders(double K, double t_star, int n_max) {
  if (!(K >= 0.0) || !(t_star > 0.0) || n_max < 0)
    throw std::invalid_argument("ladders needs K >= 0, t_star > 0, n_max >= 0");
  Ladders out;
  out.levels.resize(static_cast<std::size_t>(n_max) + 1);
  out.times.resize(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    const double pow2 = std::ldexp(1.0, -n);  // 2^{-n}
    out.levels[static_cast<std::size_t>(n)] = K * (1.0 - pow2);
    out.times[static_cast<std::size_t>(n)] = t_star * (1.0 - 0.5 * pow2);
  }
  return out;
}

double mu_exponent(double s, double p, double gamma, int d) {
  if (!(p > 0.0)) throw std::invalid_argument("mu_exponent needs p > 0");
  return (2.0 * s - gamma * d * (p - 1.0)) / (2.0 * p);
}

double compute_Q(int d, double gamma, double s, double p_or_alpha) {
  require_branch_params(d, gamma, s, p_or_alpha);
  const double dd = d;
  double e1, e2, e3;
  if (is_critical(gamma)) {
    const double a = p_or_alpha;
    e1 = 2.0;
    e2 = (4.0 * s + dd * (s - 2.0)) / (2.0 * s - 2.0 * dd);
    e3 = 2.0 * a / (2.0 * a - 1.0);
  } else {
    const double p = p_or_alpha;
    e1 = 0.5 * (dd + 4.0);
    e2 = (4.0 * s + dd * (gamma + s)) / (2.0 * s + dd * gamma);
    e3 = (2.0 * dd - (dd - 4.0) * p) / (dd - (dd - 2.0) * p);
  }
  return std::exp2(std::max({e1, e2, e3}));
}

KFormula compute_K(int d, double gamma, double s, double p_or_alpha, double t_star, double E0,
                   double y_s, double C) {
  require_branch_params(d, gamma, s, p_or_alpha);
  if (!(t_star > 0.0)) throw std::invalid_argument("t_star must be > 0");
  if (!(E0 >= 0.0) || !(y_s >= 0.0) || !(C > 0.0))
    throw std::invalid_argument("compute_K needs E0, y_s >= 0 and C > 0");
  const double dd = d;
  KFormula out;
  if (E0 == 0.0) return out;  // every K_i carries a positive power of E0
  if (is_critical(gamma)) {
    const double a = p_or_alpha;
    const double th1 = (4.0 * s - 2.0 * dd) / (dd * s);
    const double th3 = 2.0 * a - 1.0;
    out.K1 = std::pow(3.0 * C * std::pow(y_s, 2.0 / s) / t_star *
                          std::pow(E0, (2.0 * s - 2.0 * dd) / (dd * s)),
                      1.0 / th1);
    out.K2 = std::pow(3.0 * C * std::pow(E0, 2.0 / dd), dd / 4.0);
    out.K3 = std::pow(3.0 * C * std::pow(y_s, 2.0 * (1.0 - a)) * std::pow(E0, th3), 1.0 / th3);
  } else {
    const double p = p_or_alpha;
    const double yfac = std::pow(y_s, -gamma / s);
    const double th1 = (4.0 * s + dd * gamma) / (dd * s);
    const double th2 = 2.0 / p + 4.0 / dd - 2.0;
    out.K1 = std::pow(
        3.0 * C * yfac / t_star * std::pow(E0, (2.0 * s + dd * gamma) / (dd * s)), 1.0 / th1);
    out.K2 = std::pow(3.0 * C * yfac * std::pow(E0, 1.0 / p + 2.0 / dd - 1.0), 1.0 / th2);
    out.K3 = std::pow(3.0 * C * yfac * std::pow(E0, 2.0 / dd), dd / 4.0);
  }
  out.K = std::max({out.K1, out.K2, out.K3});
  out.K_sum = out.K1 + out.K2 + out.K3;
  return out;
}

DeGiorgiTrace iterate(const SnapshotSeries& series, const DeGiorgiConfig& cfg) {
  require_config(series, cfg);
  const double pa = resolve_alpha(cfg);
  const int d = series.fields.front()->grid.d;
  DeGiorgiTrace tr;
  tr.Q = compute_Q(d, cfg.gamma, cfg.s, pa);
  // E0 and sup f are ladder-cap independent.
  tr.E0 = energy_functional(series, 0.0, 0.5 * cfg.t_star, cfg.T, cfg.c0, cfg.gamma);
  tr.sup_f = sup_norm_over_window(series, cfg.t_star, cfg.T);
  double ys = 0.0;
  for (std::size_t i = 0; i < series.fields.size(); ++i) {
    if (series.times[i] < 0.0 || series.times[i] > cfg.T) continue;
    ys = std::max(ys, bracket_moment(*series.fields[i], cfg.s));
  }
  tr.y_s = ys;
  tr.K_formula = compute_K(d, cfg.gamma, cfg.s, pa, cfg.t_star, tr.E0, ys, cfg.C_empirical);

  // Smallest cap killing the top rung: E_{n_max}(K) is nonincreasing in K, so
  // bisect the predicate E_{n_max} < 1e-12 E0.
  if (tr.E0 > 0.0) {
    const double tn = cfg.t_star * (1.0 - std::ldexp(1.0, -cfg.n_max - 1));
    const double lfrac = 1.0 - std::ldexp(1.0, -cfg.n_max);
    auto top_dead = [&](double K) {
      const double E_top = energy_functional(series, K * lfrac, tn, cfg.T, cfg.c0, cfg.gamma);
      return E_top < 1e-12 * tr.E0;
    };
    double hi = std::max(tr.sup_f, 1e-30) / lfrac;
    int guard = 0;
    while (!top_dead(hi) && guard++ < 64) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 60 && (hi - lo) > 1e-4 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (top_dead(mid) ? hi : lo) = mid;
    }
    tr.K_bisect = hi;
  }

  tr.K_used = cfg.K > 0.0 ? cfg.K
                          : (tr.K_formula.K > 0.0 ? tr.K_formula.K : tr.K_bisect);
  LadderEnergies le = measure_ladder(series, cfg, tr.K_used);
  tr.levels = std::move(le.lad.levels);
  tr.times = std::move(le.lad.times);
  tr.E = std::move(le.E);
  tr.target.resize(tr.E.size());
  for (std::size_t n = 0; n < tr.E.size(); ++n)
    tr.target[n] = tr.E0 * std::pow(tr.Q, -static_cast<double>(n));
  check_decay(tr.E, tr.target, cfg.n_max, tr);
  return tr;
}

double back_solve_C(const SnapshotSeries& series, const DeGiorgiConfig& cfg) {
  require_config(series, cfg);
  const double pa = resolve_alpha(cfg);
  const int d = series.fields.front()->grid.d;
  const double Q = compute_Q(d, cfg.gamma, cfg.s, pa);
  const double E0 = energy_functional(series, 0.0, 0.5 * cfg.t_star, cfg.T, cfg.c0, cfg.gamma);
  if (E0 == 0.0) return 0.0;
  double ys = 0.0;
  for (std::size_t i = 0; i < series.fields.size(); ++i) {
    if (series.times[i] < 0.0 || series.times[i] > cfg.T) continue;
    ys = std::max(ys, bracket_moment(*series.fields[i], cfg.s));
  }
  auto decays = [&](double C) {
    const double K = compute_K(d, cfg.gamma, cfg.s, pa, cfg.t_star, E0, ys, C).K;
    LadderEnergies le = measure_ladder(series, cfg, K);
    DeGiorgiTrace probe;
    std::vector<double> target(le.E.size());
    for (std::size_t n = 0; n < le.E.size(); ++n)
      target[n] = E0 * std::pow(Q, -static_cast<double>(n));
    check_decay(le.E, target, cfg.n_max, probe);
    return probe.decay_pass;
  };
  double lo = 1e-6, hi = 1e6;
  if (decays(lo)) return lo;
  if (!decays(hi)) throw std::runtime_error("no constant in [1e-6, 1e6] makes the ladder decay");
  for (int it = 0; it < 48 && hi / lo > 1.001; ++it) {
    const double mid = std::sqrt(lo * hi);
    (decays(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace landau
