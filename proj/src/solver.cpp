#include "landau/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>

namespace landau {
namespace {

std::int64_t axis_stride(const GridSpec& g, int axis) {
  std::int64_t st = 1;
  for (int a = g.d - 1; a > axis; --a) st *= g.n;
  return st;
}

std::string format_value(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%g", x);
  return std::string(b);
}

bool all_finite(const ScalarField& f) {
  for (double v : f.v)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

std::string FunctionalRequest::column_name() const {
  switch (kind) {
    case Kind::Moment:
      return "m" + format_value(s);
    case Kind::LpMoment:
      return "M" + format_value(s) + "_" + format_value(p);
    case Kind::Dissipation:
      return "D" + format_value(s) + "_" + format_value(p);
  }
  return "?";
}

SnapshotSeries Trajectory::series() const {
  SnapshotSeries s;
  s.times = snap_times;
  s.fields.reserve(snapshots.size());
  for (const auto& f : snapshots) s.fields.push_back(&f);
  return s;
}

std::array<double, 3> normalization_residual(const ScalarField& f) {
  const double m = integrate(f);
  double mom = 0.0;
  for (int a = 0; a < f.grid.d; ++a) mom = std::max(mom, std::abs(axis_moment(f, a)));
  const double e = raw_moment(f, 2.0);
  return {m - 1.0, mom, e - static_cast<double>(f.grid.d)};
}

double sample_cubic(const ScalarField& f, const std::array<double, 3>& x) {
  const GridSpec& g = f.grid;
  double w[3][4];
  int base[3] = {0, 0, 0};
  for (int a = 0; a < g.d; ++a) {
    const double t = (x[a] + g.half_width) / g.h - 0.5;
    const double fl = std::floor(t);
    const double s = t - fl;
    base[a] = static_cast<int>(fl) - 1;
    w[a][0] = -s * (s - 1.0) * (s - 2.0) / 6.0;
    w[a][1] = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    w[a][2] = -(s + 1.0) * s * (s - 2.0) / 2.0;
    w[a][3] = (s + 1.0) * s * (s - 1.0) / 6.0;
  }
  double acc = 0.0;
  if (g.d == 3) {
    for (int i = 0; i < 4; ++i) {
      const int ix = base[0] + i;
      if (ix < 0 || ix >= g.n) continue;
      for (int j = 0; j < 4; ++j) {
        const int iy = base[1] + j;
        if (iy < 0 || iy >= g.n) continue;
        const double wij = w[0][i] * w[1][j];
        const std::int64_t row = (static_cast<std::int64_t>(ix) * g.n + iy) * g.n;
        for (int k = 0; k < 4; ++k) {
          const int iz = base[2] + k;
          if (iz < 0 || iz >= g.n) continue;
          acc += wij * w[2][k] * f.v[row + iz];
        }
      }
    }
  } else {
    for (int i = 0; i < 4; ++i) {
      const int ix = base[0] + i;
      if (ix < 0 || ix >= g.n) continue;
      for (int j = 0; j < 4; ++j) {
        const int iy = base[1] + j;
        if (iy < 0 || iy >= g.n) continue;
        acc += w[0][i] * w[1][j] * f.v[static_cast<std::int64_t>(ix) * g.n + iy];
      }
    }
  }
  return acc;
}

namespace {

// g(v) = f(alpha v + u), clamped at 0, then rescaled to unit mass.
ScalarField resample_normalized(const ScalarField& f, double alpha,
                                const std::array<double, 3>& u) {
  const GridSpec& g = f.grid;
  ScalarField out = make_scalar(g);
#pragma omp parallel for schedule(static)
  for (std::int64_t id = 0; id < g.cells; ++id) {
    const auto x = g.node(id);
    std::array<double, 3> y{0.0, 0.0, 0.0};
    for (int a = 0; a < g.d; ++a) y[a] = alpha * x[a] + u[a];
    out.v[id] = std::max(0.0, sample_cubic(f, y));
  }
  const double m = integrate(out);
  if (!(m > 0.0)) throw std::runtime_error("normalize_initial: rescaled mass vanished");
  const double inv = 1.0 / m;
  for (double& v : out.v) v *= inv;
  return out;
}

// momentum components and energy defect of a unit-mass field
std::vector<double> moment_residual(const ScalarField& f) {
  const int d = f.grid.d;
  std::vector<double> r(static_cast<std::size_t>(d) + 1);
  for (int a = 0; a < d; ++a) r[static_cast<std::size_t>(a)] = axis_moment(f, a);
  r[static_cast<std::size_t>(d)] = raw_moment(f, 2.0) - d;
  return r;
}

// Solve J x = rhs in place (tiny dense system, partial pivoting).
std::vector<double> solve_dense(std::vector<std::vector<double>> J, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(J[r][c]) > std::abs(J[piv][c])) piv = r;
    if (std::abs(J[piv][c]) < 1e-300)
      throw std::runtime_error("normalize_initial: singular Jacobian");
    std::swap(J[c], J[piv]);
    std::swap(rhs[c], rhs[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double m = J[r][c] / J[c][c];
      for (std::size_t k = c; k < n; ++k) J[r][k] -= m * J[c][k];
      rhs[r] -= m * rhs[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = rhs[ri];
    for (std::size_t k = ri + 1; k < n; ++k) s -= J[ri][k] * x[k];
    x[ri] = s / J[ri][ri];
  }
  return x;
}

}  // namespace

ScalarField normalize_initial(const ScalarField& f) {
  const auto res0 = normalization_residual(f);
  if (std::abs(res0[0]) < 1e-12 && std::abs(res0[1]) < 1e-12 && std::abs(res0[2]) < 1e-12)
    return f;

  const double m = integrate(f);
  if (!(m > 0.0)) throw std::invalid_argument("normalize_initial: nonpositive mass");
  const int d = f.grid.d;

  std::array<double, 3> u{0.0, 0.0, 0.0};
  double mean2 = 0.0;
  for (int a = 0; a < d; ++a) {
    u[a] = axis_moment(f, a) / m;
    mean2 += u[a] * u[a];
  }
  const double c2 = raw_moment(f, 2.0) / m - mean2;
  if (!(c2 > 0.0)) throw std::invalid_argument("normalize_initial: degenerate second moment");
  double alpha = std::sqrt(c2 / d);

  const std::size_t np = static_cast<std::size_t>(d) + 1;  // (alpha, u)
  ScalarField best = resample_normalized(f, alpha, u);
  std::vector<double> r = moment_residual(best);
  auto rnorm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double t : v) s = std::max(s, std::abs(t));
    return s;
  };

  for (int iter = 0; iter < 30 && rnorm(r) >= 1e-13; ++iter) {
    std::vector<std::vector<double>> J(np, std::vector<double>(np));
    const double da = 1e-6 * std::max(1.0, std::abs(alpha));
    {
      ScalarField gp = resample_normalized(f, alpha + da, u);
      const auto rp = moment_residual(gp);
      for (std::size_t i = 0; i < np; ++i) J[i][0] = (rp[i] - r[i]) / da;
    }
    for (int a = 0; a < d; ++a) {
      auto up = u;
      const double du = 1e-6 * std::max(1.0, std::abs(u[a]));
      up[a] += du;
      ScalarField gp = resample_normalized(f, alpha, up);
      const auto rp = moment_residual(gp);
      for (std::size_t i = 0; i < np; ++i) J[i][static_cast<std::size_t>(a) + 1] = (rp[i] - r[i]) / du;
    }
    std::vector<double> neg_r(np);
    for (std::size_t i = 0; i < np; ++i) neg_r[i] = -r[i];
    const auto delta = solve_dense(std::move(J), std::move(neg_r));
    alpha += delta[0];
    for (int a = 0; a < d; ++a) u[a] += delta[static_cast<std::size_t>(a) + 1];
    if (!(alpha > 0.0)) throw std::runtime_error("normalize_initial: scale collapsed");
    best = resample_normalized(f, alpha, u);
    r = moment_residual(best);
  }
  if (rnorm(r) > 1e-10)
    throw std::runtime_error("normalize_initial: did not converge to 1e-10");
  return best;
}

namespace {

// Face-averaged divergence of per-node fluxes: interior faces take the
// arithmetic average of adjacent node fluxes, boundary faces carry zero, so
// the cell sum telescopes to zero exactly.
void add_face_divergence(const GridSpec& g, int axis, const std::vector<double>& flux,
                         ScalarField& out) {
  const std::int64_t st = axis_stride(g, axis);
  const double inv_h = 1.0 / g.h;
#pragma omp parallel for schedule(static)
  for (std::int64_t id = 0; id < g.cells; ++id) {
    const int pos = static_cast<int>((id / st) % g.n);
    const double right = pos + 1 < g.n ? 0.5 * (flux[id] + flux[id + st]) : 0.0;
    const double left = pos > 0 ? 0.5 * (flux[id - st] + flux[id]) : 0.0;
    out.v[id] += (right - left) * inv_h;
  }
}

// Gradient adjoint to the face-averaged divergence under summation by parts:
// centered differences in the interior, halved one-sided ones on the
// outermost layers. Applied to log(max(f, tiny)) and clamped to +-clamp
// (the clamp engages only on ratios far beyond resolvable, where the
// vanishing flux prefactor makes the value irrelevant).
VectorField sbp_log_gradient(const ScalarField& f, double clamp) {
  const GridSpec& g = f.grid;
  constexpr double kLogFloor = 1e-300;
  std::vector<double> logf(static_cast<std::size_t>(g.cells));
#pragma omp parallel for schedule(static)
  for (std::int64_t id = 0; id < g.cells; ++id)
    logf[id] = std::log(std::max(f.v[id], kLogFloor));

  VectorField out = make_vector(g);
  const double inv2h = 1.0 / (2.0 * g.h);
  for (int axis = 0; axis < g.d; ++axis) {
    const std::int64_t st = axis_stride(g, axis);
    double* dst = out.comp[axis].data();
#pragma omp parallel for schedule(static)
    for (std::int64_t id = 0; id < g.cells; ++id) {
      const int pos = static_cast<int>((id / st) % g.n);
      const double up = pos + 1 < g.n ? logf[id + st] : logf[id];
      const double dn = pos > 0 ? logf[id - st] : logf[id];
      dst[id] = std::clamp((up - dn) * inv2h, -clamp, clamp);
    }
  }
  return out;
}

// Negative cells clipped to zero. The log-form conservation and entropy
// identities require the diffusion matrix and the drift to be built from the
// same nonnegative field, so step drivers feed this through coefficients()
// and apply_collision() instead of the raw state.
ScalarField clipped_nonneg(const ScalarField& f) {
  ScalarField out = f;
  for (double& v : out.v)
    if (v < 0.0) v = 0.0;
  return out;
}

}  // namespace

ScalarField apply_operator(const ScalarField& f, const CoefficientSet& coeffs) {
  const GridSpec& g = f.grid;
  if (!same_shape(g, coeffs.A.grid))
    throw std::invalid_argument("apply_operator: grid mismatch");
  if (!coeffs.has_beta)
    throw std::invalid_argument("apply_operator: coefficient set lacks beta = a * grad f");
  const VectorField grad = gradient(f);
  ScalarField out = make_scalar(g);
  std::vector<double> flux(static_cast<std::size_t>(g.cells));

  for (int axis = 0; axis < g.d; ++axis) {
    const double* bax = coeffs.beta.comp[axis].data();
#pragma omp parallel for schedule(static)
    for (std::int64_t id = 0; id < g.cells; ++id) {
      double F = -f.v[id] * bax[id];
      for (int j = 0; j < g.d; ++j)
        F += coeffs.A.comp[sym_index(axis, j, g.d)][id] * grad.comp[j][id];
      flux[id] = F;
    }
    add_face_divergence(g, axis, flux, out);
  }
  return out;
}

ScalarField apply_collision(const ScalarField& f, KernelSet& ks, const CoefficientSet& coeffs,
                            FluxForm form, double* drift_max) {
  const GridSpec& g = f.grid;
  if (!same_shape(g, coeffs.A.grid))
    throw std::invalid_argument("apply_collision: grid mismatch");

  if (form == FluxForm::Gradient) {
    if (drift_max) {
      double dmax = 0.0;
#pragma omp parallel for schedule(static) reduction(max : dmax)
      for (std::int64_t id = 0; id < g.cells; ++id)
        for (int a = 0; a < g.d; ++a) dmax = std::max(dmax, std::abs(coeffs.beta.comp[a][id]));
      *drift_max = dmax;
    }
    return apply_operator(f, coeffs);
  }

  // log-gradient form: F = fp (A g - a * (fp g)), fp = max(f, 0)
  // clamp at 20/h: resolvable per-cell log ratios stay well below it
  const VectorField gtil = sbp_log_gradient(f, 20.0 / g.h);
  VectorField w = make_vector(g);
  for (int a = 0; a < g.d; ++a) {
    double* dst = w.comp[a].data();
    const double* gv = gtil.comp[a].data();
#pragma omp parallel for schedule(static)
    for (std::int64_t id = 0; id < g.cells; ++id)
      dst[id] = f.v[id] > 0.0 ? f.v[id] * gv[id] : 0.0;
  }
  const VectorField beta = ks.conv_rows(w);

  if (drift_max) {
    double dmax = 0.0;
#pragma omp parallel for schedule(static) reduction(max : dmax)
    for (std::int64_t id = 0; id < g.cells; ++id)
      for (int a = 0; a < g.d; ++a) dmax = std::max(dmax, std::abs(beta.comp[a][id]));
    *drift_max = dmax;
  }

  ScalarField out = make_scalar(g);
  std::vector<double> flux(static_cast<std::size_t>(g.cells));
  for (int axis = 0; axis < g.d; ++axis) {
    const double* bax = beta.comp[axis].data();
#pragma omp parallel for schedule(static)
    for (std::int64_t id = 0; id < g.cells; ++id) {
      const double fp = std::max(f.v[id], 0.0);
      double u = -bax[id];
      for (int j = 0; j < g.d; ++j)
        u += coeffs.A.comp[sym_index(axis, j, g.d)][id] * gtil.comp[j][id];
      flux[id] = fp * u;
    }
    add_face_divergence(g, axis, flux, out);
  }
  return out;
}

double cfl_dt(double lambda_max, double drift_max, const GridSpec& g, double cfl) {
  double dt = std::numeric_limits<double>::infinity();
  if (lambda_max > 0.0) dt = g.h * g.h / (2.0 * g.d * lambda_max);
  if (drift_max > 0.0) dt = std::min(dt, g.h / (2.0 * g.d * drift_max));
  return cfl * dt;
}

namespace {

// One operator evaluation honoring the flux form's input contract: the
// gradient form acts on the raw state, the log form on the clipped state
// with coefficients built from it.
ScalarField stage_rate(const ScalarField& f, KernelSet& ks, FluxForm form) {
  if (form == FluxForm::Gradient) {
    const CoefficientSet c = ks.coefficients(f, false, true);
    return apply_collision(f, ks, c, form);
  }
  const ScalarField fc = clipped_nonneg(f);
  const CoefficientSet c = ks.coefficients(fc, false, false);
  return apply_collision(fc, ks, c, form);
}

}  // namespace

ScalarField heun_step(const ScalarField& f, KernelSet& ks, double dt, FluxForm form) {
  const ScalarField k1 = stage_rate(f, ks, form);
  ScalarField f1 = f;
  for (std::size_t i = 0; i < f1.v.size(); ++i) f1.v[i] += dt * k1.v[i];
  const ScalarField k2 = stage_rate(f1, ks, form);
  ScalarField out = f;
  for (std::size_t i = 0; i < out.v.size(); ++i)
    out.v[i] += 0.5 * dt * (k1.v[i] + k2.v[i]);
  return out;
}

ScalarField euler_step(const ScalarField& f, KernelSet& ks, double dt, FluxForm form) {
  const ScalarField k1 = stage_rate(f, ks, form);
  ScalarField out = f;
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += dt * k1.v[i];
  return out;
}

namespace {

DiagnosticsRow make_row(const ScalarField& f, double t, double dt, double k0,
                        const SolverConfig& cfg) {
  DiagnosticsRow row;
  row.time = t;
  row.dt = dt;
  row.mass = integrate(f);
  for (int a = 0; a < f.grid.d; ++a) row.momentum[a] = axis_moment(f, a);
  row.energy = raw_moment(f, 2.0);
  row.entropy_val = entropy(f);
  row.k0 = k0;
  row.min_f = f.v.empty() ? 0.0 : *std::min_element(f.v.begin(), f.v.end());
  row.extra.reserve(cfg.functionals.size());
  for (const auto& req : cfg.functionals) {
    switch (req.kind) {
      case FunctionalRequest::Kind::Moment:
        row.extra.push_back(bracket_moment(f, req.s));
        break;
      case FunctionalRequest::Kind::LpMoment:
        row.extra.push_back(M_sp(f, req.s, req.p));
        break;
      case FunctionalRequest::Kind::Dissipation:
        row.extra.push_back(D_sp(f, req.s, req.p));
        break;
    }
  }
  return row;
}

void push_snapshot(Trajectory& traj, double t, const ScalarField& f) {
  const double eps = 1e-12 * std::max(1.0, std::abs(t));
  if (!traj.snap_times.empty() && std::abs(traj.snap_times.back() - t) <= eps) return;
  traj.snap_times.push_back(t);
  traj.snapshots.push_back(f);
}

}  // namespace

Trajectory run(const ScalarField& f0, KernelSet& ks, const SolverConfig& cfg, double t_start,
               std::uint64_t step_start) {
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0))
    throw std::invalid_argument("run: cfl must lie in (0, 1]");
  if (!(cfg.t_end >= t_start)) throw std::invalid_argument("run: t_end < t_start");
  if (!(cfg.snapshot_interval > 0.0))
    throw std::invalid_argument("run: snapshot_interval must be positive");

  Trajectory traj;
  traj.grid = f0.grid;
  traj.steps = step_start;
  ScalarField f = f0;
  double t = t_start;

  const double eps_t = 1e-12 * std::max(1.0, std::abs(cfg.t_end));
  auto next_cadence = [&](double tt) {
    return (std::floor(tt / cfg.snapshot_interval * (1.0 + 1e-12)) + 1.0) *
           cfg.snapshot_interval;
  };
  double next_snap = next_cadence(t);
  push_snapshot(traj, t, f);

  const bool log_form = cfg.flux == FluxForm::LogGradient;
  const std::uint64_t step_budget = step_start + 5'000'000;
  for (;;) {
    const ScalarField fop = log_form ? clipped_nonneg(f) : f;
    const CoefficientSet coeffs = ks.coefficients(fop, false, !log_form);
    const SpectralStats stats = spectral_stats(coeffs, cfg.gamma);
    if (!(stats.lambda_max > 0.0) || !std::isfinite(stats.lambda_max)) {
      traj.rows.push_back(make_row(f, t, 0.0, stats.k0, cfg));
      traj.aborted = true;
      traj.abort_reason = "degenerate diffusion coefficient";
      push_snapshot(traj, t, f);
      break;
    }
    if (t >= cfg.t_end - eps_t) {
      traj.rows.push_back(make_row(f, t, 0.0, stats.k0, cfg));
      push_snapshot(traj, t, f);
      break;
    }
    double drift_max = 0.0;
    const ScalarField k1 = apply_collision(fop, ks, coeffs, cfg.flux, &drift_max);
    double dt = std::min(cfl_dt(stats.lambda_max, drift_max, f.grid, cfg.cfl), cfg.t_end - t);
    traj.rows.push_back(make_row(f, t, dt, stats.k0, cfg));

    ScalarField fnew = f;
    if (cfg.scheme == TimeScheme::Euler) {
      for (std::size_t i = 0; i < fnew.v.size(); ++i) fnew.v[i] += dt * k1.v[i];
    } else {
      ScalarField f1 = f;
      for (std::size_t i = 0; i < f1.v.size(); ++i) f1.v[i] += dt * k1.v[i];
      const ScalarField k2 = stage_rate(f1, ks, cfg.flux);
      for (std::size_t i = 0; i < fnew.v.size(); ++i)
        fnew.v[i] += 0.5 * dt * (k1.v[i] + k2.v[i]);
    }

    if (cfg.positivity_floor) {
      std::int64_t nclip = 0;
      for (double& v : fnew.v)
        if (v < 0.0) {
          v = 0.0;
          ++nclip;
        }
      if (nclip > 0) {
        traj.clipped_cells += static_cast<std::uint64_t>(nclip);
        const double mass_before = traj.rows.back().mass;
        const double mass_after = integrate(fnew);
        if (mass_after > 0.0) {
          const double scale = mass_before / mass_after;
          for (double& v : fnew.v) v *= scale;
        }
      }
    }

    if (!all_finite(fnew)) {
      traj.aborted = true;
      traj.abort_reason = "non-finite state at t = " + format_value(t + dt);
      push_snapshot(traj, t, f);  // last finite state
      break;
    }

    t += dt;
    f = std::move(fnew);
    ++traj.steps;
    if (t >= next_snap - eps_t) {
      push_snapshot(traj, t, f);
      next_snap = next_cadence(t);
    }
    if (traj.steps >= step_budget) {
      traj.rows.push_back(make_row(f, t, 0.0, 0.0, cfg));
      traj.aborted = true;
      traj.abort_reason = "step budget exceeded";
      push_snapshot(traj, t, f);
      break;
    }
  }
  return traj;
}

}  // namespace landau
