#include "landau/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace landau {
namespace {

// Applies op(value, coords) over all cells, materializing coordinates
// incrementally instead of calling unflat per cell.
template <typename Op>
void for_each_cell(const GridSpec& g, Op&& op) {
  std::array<int, 3> idx{0, 0, 0};
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < g.d; ++a) x[a] = g.coord(0);
  const std::size_t cells = static_cast<std::size_t>(g.cells);
  for (std::size_t id = 0; id < cells; ++id) {
    op(id, x);
    // row-major: last axis fastest
    for (int a = g.d - 1; a >= 0; --a) {
      if (++idx[a] < g.n) {
        x[a] = g.coord(idx[a]);
        break;
      }
      idx[a] = 0;
      x[a] = g.coord(0);
    }
  }
}

double bracket_weight(const std::array<double, 3>& x, int d, double expo) {
  double r2 = 0.0;
  for (int a = 0; a < d; ++a) r2 += x[a] * x[a];
  return std::pow(1.0 + r2, 0.5 * expo);
}

}  // namespace

ScalarField weighted_power(const ScalarField& f, double s, double p) {
  ScalarField out = make_scalar(f.grid);
  const double half_p = 0.5 * p;
  for_each_cell(f.grid, [&](std::size_t id, const std::array<double, 3>& x) {
    const double v = f.v[id];
    if (v <= 0.0) {
      out.v[id] = 0.0;
      return;
    }
    out.v[id] = bracket_weight(x, f.grid.d, 0.5 * s) * std::pow(v, half_p);
  });
  return out;
}

double M_sp(const ScalarField& f, double s, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("M_sp: requires p > 1");
  std::vector<double> terms(f.v.size());
  for_each_cell(f.grid, [&](std::size_t id, const std::array<double, 3>& x) {
    const double v = f.v[id];
    terms[id] = v <= 0.0 ? 0.0 : bracket_weight(x, f.grid.d, s) * std::pow(v, p);
  });
  return det_sum(terms) * f.grid.cell_volume();
}

double D_sp(const ScalarField& f, double s, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("D_sp: requires p > 1");
  return gradient_sq_integral(weighted_power(f, s, p));
}

double bracket_moment(const ScalarField& f, double s) {
  std::vector<double> terms(f.v.size());
  for_each_cell(f.grid, [&](std::size_t id, const std::array<double, 3>& x) {
    terms[id] = f.v[id] * bracket_weight(x, f.grid.d, s);
  });
  return det_sum(terms) * f.grid.cell_volume();
}

double entropy(const ScalarField& f) {
  std::vector<double> terms(f.v.size());
  for (std::size_t id = 0; id < f.v.size(); ++id) {
    const double v = f.v[id];
    terms[id] = v > 0.0 ? v * std::log(v) : 0.0;
  }
  return det_sum(terms) * f.grid.cell_volume();
}

double entropy_positive_part(const ScalarField& f) {
  std::vector<double> terms(f.v.size());
  for (std::size_t id = 0; id < f.v.size(); ++id) {
    const double v = f.v[id];
    terms[id] = v > 1.0 ? v * std::log(v) : 0.0;
  }
  return det_sum(terms) * f.grid.cell_volume();
}

double psi_moment(const ScalarField& f, double s) {
  if (!(s > 2.0)) throw std::invalid_argument("psi_moment: requires s > 2");
  return raw_moment(f, s);
}

ScalarField level_truncate(const ScalarField& f, double ell) {
  if (ell < 0.0) throw std::invalid_argument("level_truncate: requires ell >= 0");
  ScalarField out = make_scalar(f.grid);
  for (std::size_t id = 0; id < f.v.size(); ++id)
    out.v[id] = f.v[id] >= ell ? f.v[id] - ell : 0.0;
  return out;
}

namespace {

std::vector<std::size_t> window_indices(const SnapshotSeries& series, double T1, double T2) {
  if (series.times.size() != series.fields.size())
    throw std::invalid_argument("energy_functional: times/fields size mismatch");
  if (!(T2 >= T1)) throw std::invalid_argument("energy_functional: requires T2 >= T1");
  const double eps = 1e-12 * std::max({1.0, std::abs(T1), std::abs(T2)});
  std::vector<std::size_t> sel;
  for (std::size_t i = 0; i < series.times.size(); ++i)
    if (series.times[i] >= T1 - eps && series.times[i] <= T2 + eps) sel.push_back(i);
  if (sel.empty()) throw std::invalid_argument("energy_functional: empty time window");
  if (T2 > T1) {
    const double max_gap = (T2 - T1) / 16.0 * (1.0 + 1e-9) + eps;
    double worst = std::max(series.times[sel.front()] - T1, T2 - series.times[sel.back()]);
    for (std::size_t k = 1; k < sel.size(); ++k)
      worst = std::max(worst, series.times[sel[k]] - series.times[sel[k - 1]]);
    if (worst > max_gap)
      throw std::invalid_argument("energy_functional: snapshots too sparse for window");
  }
  return sel;
}

}  // namespace

double energy_functional(const SnapshotSeries& series, double ell, double T1, double T2,
                         double c0, double gamma) {
  const auto sel = window_indices(series, T1, T2);
  double best = 0.0;
  double integral = 0.0;
  double prev_t = 0.0, prev_d = 0.0;
  for (std::size_t k = 0; k < sel.size(); ++k) {
    const ScalarField& f = *series.fields[sel[k]];
    const double t = series.times[sel[k]];
    ScalarField trunc = level_truncate(f, ell);
    const double l2 = inner(trunc, trunc);
    // D-term integrand: grad of <.>^{gamma/2} f_ell^+ (p = 2 halves back to power 1)
    const double dint = gradient_sq_integral(weighted_power(trunc, gamma, 2.0));
    if (k > 0) integral += 0.5 * (t - prev_t) * (dint + prev_d);
    best = std::max(best, 0.5 * l2 + c0 * integral);
    prev_t = t;
    prev_d = dint;
  }
  return best;
}

double sup_norm_over_window(const SnapshotSeries& series, double T1, double T2) {
  const auto sel = window_indices(series, T1, T2);
  double best = 0.0;
  for (std::size_t i : sel)
    for (double v : series.fields[i]->v) best = std::max(best, v);
  return best;
}

}  // namespace landau
