#include "landau/inequalities.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "landau/functionals.hpp"
#include "landau/test_fields.hpp"

namespace landau {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Visit every cell with its center coordinates (row-major, last axis fastest).
template <class Fn>
void cellwise(const GridSpec& g, Fn&& fn) {
  std::array<int, 3> m{0, 0, 0};
  std::array<double, 3> v{0.0, 0.0, 0.0};
  for (int a = 0; a < g.d; ++a) v[a] = g.coord(0);
  const std::size_t cells = static_cast<std::size_t>(g.cells);
  for (std::size_t id = 0; id < cells; ++id) {
    fn(id, v);
    for (int a = g.d - 1; a >= 0; --a) {
      if (++m[a] < g.n) {
        v[a] = g.coord(m[a]);
        break;
      }
      m[a] = 0;
      v[a] = g.coord(0);
    }
  }
}

double sq(double x) { return x * x; }

double bracket2(const std::array<double, 3>& v, int d) {
  double r2 = 0.0;
  for (int a = 0; a < d; ++a) r2 += v[a] * v[a];
  return 1.0 + r2;
}

// h^d sum of a cellwise-accumulated buffer, deterministically.
double cell_integral(const GridSpec& g, std::vector<double>& buf) {
  return det_sum(buf) * g.cell_volume();
}

// ---------------------------------------------------------------------------
// Pair-sum tables: |z|^lambda over the offset cube, singular cell replaced by
// its equal-volume-ball mean (d/(d+lambda)) rho^lambda — the same rule the
// convolution kernels use.
// ---------------------------------------------------------------------------

struct PairTables {
  int span = 0;  // 2n-1 offsets per axis
  std::vector<double> r2;
  std::vector<double> kpow;

  std::size_t index(const std::array<int, 3>& di, const std::array<int, 3>& dj, int d) const {
    std::size_t id = 0;
    for (int a = 0; a < d; ++a) id = id * static_cast<std::size_t>(span) +
                                     static_cast<std::size_t>(di[a] - dj[a] + span / 2);
    return id;
  }
};

PairTables make_pair_tables(const GridSpec& g, double lambda) {
  if (g.d + lambda <= 0.0) throw std::invalid_argument("pair kernel: lambda + d must be positive");
  PairTables t;
  t.span = 2 * g.n - 1;
  std::size_t total = 1;
  for (int a = 0; a < g.d; ++a) total *= static_cast<std::size_t>(t.span);
  t.r2.resize(total);
  t.kpow.resize(total);
  const double rho = equal_volume_ball_radius(g);
  const double origin = (g.d / (g.d + lambda)) * std::pow(rho, lambda);
  std::array<int, 3> off{0, 0, 0};
  for (std::size_t id = 0; id < total; ++id) {
    double r2 = 0.0;
    for (int a = 0; a < g.d; ++a) r2 += sq((off[a] - (t.span / 2)) * g.h);
    t.r2[id] = r2;
    t.kpow[id] = (r2 > 0.0) ? std::pow(r2, 0.5 * lambda) : origin;
    for (int a = g.d - 1; a >= 0; --a) {
      if (++off[a] < t.span) break;
      off[a] = 0;
    }
  }
  return t;
}

std::vector<std::array<int, 3>> integer_coords(const GridSpec& g) {
  std::vector<std::array<int, 3>> m(static_cast<std::size_t>(g.cells), {0, 0, 0});
  std::array<int, 3> c{0, 0, 0};
  for (std::size_t id = 0; id < m.size(); ++id) {
    m[id] = c;
    for (int a = g.d - 1; a >= 0; --a) {
      if (++c[a] < g.n) break;
      c[a] = 0;
    }
  }
  return m;
}

void require_pair_grid(const GridSpec& g) {
  if (g.n > 32)
    throw std::invalid_argument("direct double sums are restricted to coarse grids (n <= 32)");
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!same_shape(a.grid, b.grid)) throw std::invalid_argument("fields live on different grids");
}

double weighted_lp(const GridSpec& g, const std::vector<double>& vals,
                   const std::vector<double>& bw2, double a, double p) {
  std::vector<double> buf(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    buf[i] = std::pow(bw2[i], 0.5 * a * p) * std::pow(vals[i], p);
  const double s = cell_integral(g, buf);
  return std::pow(s, 1.0 / p);
}

}  // namespace

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit needs two or more (x, y) pairs");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
  LinearFit out;
  out.slope = (n * sxy - sx * sy) / den;
  out.intercept = (sy - out.slope * sx) / n;
  return out;
}

// ---------------------------------------------------------------------------
// Poincare sides
// ---------------------------------------------------------------------------

PoincareSides poincare_sides(const ScalarField& c_lambda_field, const ScalarField& phi,
                             double gamma) {
  require_same_grid(c_lambda_field, phi);
  const GridSpec& g = phi.grid;
  PoincareSides out;

  std::vector<double> lhs_buf(phi.v.size());
  std::vector<double> l2_buf(phi.v.size());
  ScalarField w = make_scalar(g);  // <v>^{gamma/2} phi
  cellwise(g, [&](std::size_t id, const std::array<double, 3>& v) {
    const double b2 = bracket2(v, g.d);
    const double p2 = sq(phi.v[id]);
    lhs_buf[id] = -p2 * c_lambda_field.v[id];
    l2_buf[id] = p2 * std::pow(b2, 0.5 * gamma);
    w.v[id] = std::pow(b2, 0.25 * gamma) * phi.v[id];
  });
  out.lhs = cell_integral(g, lhs_buf);
  out.l2_term = cell_integral(g, l2_buf);
  out.d_term = gradient_sq_integral(w);
  return out;
}

PoincareSides poincare_sides(KernelSet& ks, const ScalarField& f, const ScalarField& phi,
                             double lambda) {
  const double gamma = ks.gamma();
  if (lambda + phi.grid.d <= 0.0)
    throw std::invalid_argument("poincare_sides: lambda + d must be positive");
  KernelComponent comp;
  if (std::abs(lambda - gamma) <= 1e-12) {
    comp = KernelComponent::C_gamma;
  } else if (std::abs(lambda - (gamma + 1.0)) <= 1e-12) {
    comp = KernelComponent::C_gamma_plus_1;
  } else {
    throw std::invalid_argument("poincare_sides: lambda must be gamma or gamma + 1");
  }
  require_same_grid(f, phi);
  ScalarField c = ks.convolve(comp, f);
  return poincare_sides(c, phi, gamma);
}

// ---------------------------------------------------------------------------
// Test-function family
// ---------------------------------------------------------------------------

namespace {

std::vector<std::array<int, 3>> hermite_indices(int d, int max_degree) {
  std::vector<std::array<int, 3>> out;
  const int cap = max_degree;
  for (int total = 1; total <= cap; ++total) {
    std::array<int, 3> k{0, 0, 0};
    // enumerate all k with sum == total, lexicographically
    std::function<void(int, int)> rec = [&](int axis, int left) {
      if (axis == d - 1) {
        k[axis] = left;
        out.push_back(k);
        return;
      }
      for (int v = left; v >= 0; --v) {
        k[axis] = v;
        rec(axis + 1, left - v);
      }
    };
    rec(0, total);
  }
  return out;
}

int family_count(const GridSpec& g, const PoincareFamilyConfig& cfg) {
  int centers = 1;
  for (int a = 0; a < g.d; ++a) centers *= 3;
  const int nh = static_cast<int>(hermite_indices(g.d, cfg.hermite_max_degree).size());
  return static_cast<int>(cfg.widths.size()) * (centers + nh) + cfg.random_members;
}

// Member m of the documented family, built on demand so sweeps on fine grids
// never hold more than one test function at a time.
ScalarField family_member(const GridSpec& g, const PoincareFamilyConfig& cfg, int m) {
  const int nw = static_cast<int>(cfg.widths.size());
  int centers = 1;
  for (int a = 0; a < g.d; ++a) centers *= 3;
  const int gauss_total = nw * centers;
  if (m < gauss_total) {
    const double width = cfg.widths[static_cast<std::size_t>(m / centers)];
    int code = m % centers;
    std::array<double, 3> c{0.0, 0.0, 0.0};
    for (int a = g.d - 1; a >= 0; --a) {
      c[a] = (code % 3 - 1) * cfg.center_extent;
      code /= 3;
    }
    return fields::gaussian(g, c, width);
  }
  m -= gauss_total;
  const auto herm = hermite_indices(g.d, cfg.hermite_max_degree);
  const int herm_total = nw * static_cast<int>(herm.size());
  if (m < herm_total) {
    const double width = cfg.widths[static_cast<std::size_t>(m) / herm.size()];
    const auto& deg = herm[static_cast<std::size_t>(m) % herm.size()];
    return fields::hermite_gaussian(g, {0.0, 0.0, 0.0}, width, deg);
  }
  m -= herm_total;
  // independent per-member seeds keep generation order-free
  fields::Rng rng(cfg.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(m + 1));
  return fields::band_limited_random(g, rng, 12, cfg.random_kmax, cfg.random_envelope);
}

std::string family_descriptor(const GridSpec& g, const PoincareFamilyConfig& cfg) {
  std::ostringstream os;
  os << "gaussians{centers=3^" << g.d << "@" << cfg.center_extent << ", widths=[";
  for (std::size_t i = 0; i < cfg.widths.size(); ++i)
    os << (i ? "," : "") << cfg.widths[i];
  os << "]} + hermite{deg<=" << cfg.hermite_max_degree << ", same widths} + random{"
     << cfg.random_members << ", kmax=" << cfg.random_kmax << ", env=" << cfg.random_envelope
     << "}";
  return os.str();
}

}  // namespace

std::vector<ScalarField> poincare_family(const GridSpec& g, const PoincareFamilyConfig& cfg) {
  if (cfg.widths.empty() && cfg.random_members <= 0)
    throw std::invalid_argument("poincare family is empty");
  const int total = family_count(g, cfg);
  std::vector<ScalarField> out;
  out.reserve(static_cast<std::size_t>(total));
  for (int m = 0; m < total; ++m) out.push_back(family_member(g, cfg, m));
  return out;
}

PoincareReport estimate_C_of_eps(KernelSet& ks, const ScalarField& f,
                                 const std::vector<double>& eps_list,
                                 const PoincareFamilyConfig& family) {
  const GridSpec& g = f.grid;
  const double gamma = ks.gamma();
  if (eps_list.empty()) throw std::invalid_argument("estimate_C_of_eps: empty eps list");
  for (double e : eps_list)
    if (!(e > 0.0)) throw std::invalid_argument("estimate_C_of_eps: eps must be positive");
  const int total = family_count(g, family);
  if (total <= 0) throw std::invalid_argument("estimate_C_of_eps: empty family");

  ScalarField c = ks.convolve(KernelComponent::C_gamma, f);

  // One (lhs, d, l2) triple per member; the eps sweep is then free.
  std::vector<PoincareSides> sides(static_cast<std::size_t>(total));
  for (int m = 0; m < total; ++m) {
    ScalarField phi = family_member(g, family, m);
    sides[static_cast<std::size_t>(m)] = poincare_sides(c, phi, gamma);
  }

  PoincareReport rep;
  rep.gamma = gamma;
  rep.eps = eps_list;
  std::sort(rep.eps.begin(), rep.eps.end());
  rep.family_descriptor = family_descriptor(g, family);
  rep.seed = family.seed;
  rep.family_size = total;

  rep.C.resize(rep.eps.size());
  rep.argmax_id.resize(rep.eps.size());
  for (std::size_t i = 0; i < rep.eps.size(); ++i) {
    double best = -kInf;
    int arg = -1;
    for (int m = 0; m < total; ++m) {
      const auto& s = sides[static_cast<std::size_t>(m)];
      if (!(s.l2_term > 0.0)) continue;
      const double val = (s.lhs - rep.eps[i] * s.d_term) / s.l2_term;
      if (val > best) {
        best = val;
        arg = m;
      }
    }
    rep.C[i] = best;
    rep.argmax_id[i] = arg;
  }

  // Fit window: the decade below the largest eps still showing C > 2 C(eps_max).
  const double threshold = 2.0 * std::max(rep.C.back(), 0.0);
  double eps_hi = 0.0;
  for (std::size_t i = rep.eps.size(); i-- > 0;) {
    if (rep.C[i] > threshold) {
      eps_hi = rep.eps[i];
      break;
    }
  }
  auto fit_over = [&](double lo, double hi) -> std::pair<bool, double> {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < rep.eps.size(); ++i) {
      if (rep.eps[i] < lo * (1.0 - 1e-9) || rep.eps[i] > hi * (1.0 + 1e-9)) continue;
      if (!(rep.C[i] > 0.0)) continue;
      lx.push_back(std::log(rep.eps[i]));
      ly.push_back(std::log(rep.C[i]));
    }
    if (lx.size() < 2) return {false, 0.0};
    return {true, linear_fit(lx, ly).slope};
  };
  if (eps_hi > 0.0) {
    rep.window_lo = eps_hi / 10.0;
    rep.window_hi = eps_hi;
    auto [ok, slope] = fit_over(rep.window_lo, rep.window_hi);
    if (!ok) {
      rep.window_lo = eps_hi / 100.0;
      std::tie(ok, slope) = fit_over(rep.window_lo, rep.window_hi);
    }
    rep.slope = ok ? slope : std::numeric_limits<double>::quiet_NaN();
    for (int k = 0; k < 3; ++k) {
      auto [wok, wslope] = fit_over(eps_hi * std::pow(10.0, -k - 1), eps_hi * std::pow(10.0, -k));
      if (wok) rep.window_slopes.push_back(wslope);
    }
  } else {
    rep.slope = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Splitting inequality, direct double sum
// ---------------------------------------------------------------------------

SplitReport splitting_check(const ScalarField& f, const ScalarField& phi, double gamma) {
  require_same_grid(f, phi);
  const GridSpec& g = f.grid;
  require_pair_grid(g);
  if (gamma < -2.0 || gamma >= 0.0)
    throw std::invalid_argument("splitting_check: gamma must lie in [-2, 0)");
  if (g.d + gamma <= 0.0) throw std::invalid_argument("splitting_check: gamma + d must be positive");

  const PairTables tab = make_pair_tables(g, gamma);
  const auto coords = integer_coords(g);
  const std::size_t cells = static_cast<std::size_t>(g.cells);

  // Per-cell data; f-side restricted to its support.
  std::vector<double> fpos(cells), Fneg(cells), phi2(cells), b2(cells), bg(cells);
  cellwise(g, [&](std::size_t id, const std::array<double, 3>& v) {
    fpos[id] = std::max(f.v[id], 0.0);
    const double w2 = bracket2(v, g.d);
    Fneg[id] = std::pow(w2, -0.5 * gamma) * fpos[id];
    phi2[id] = sq(phi.v[id]);
    b2[id] = w2;
    bg[id] = std::pow(w2, 0.5 * gamma);
  });
  std::vector<std::size_t> supp;
  for (std::size_t j = 0; j < cells; ++j)
    if (fpos[j] > 0.0) supp.push_back(j);

  const double kappa = (g.d - 1) * (gamma + g.d);
  double I_phi = 0.0, I1 = 0.0, I2 = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    if (phi2[i] == 0.0) continue;
    const double quarter = 0.25 * b2[i];
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t j : supp) {
      const std::size_t off = tab.index(coords[i], coords[j], g.d);
      const double k = tab.kpow[off];
      s0 += fpos[j] * k;
      if (tab.r2[off] >= quarter) {
        s1 += fpos[j];
      } else {
        s2 += Fneg[j] * k;
      }
    }
    I_phi += phi2[i] * s0;
    I1 += bg[i] * phi2[i] * s1;
    I2 += bg[i] * phi2[i] * s2;
  }
  const double h2d = sq(g.cell_volume());
  SplitReport rep;
  rep.I_phi = kappa * I_phi * h2d;
  rep.I1 = I1 * h2d;
  rep.I2 = I2 * h2d;
  rep.rhs = std::pow(2.0, -gamma) * kappa * (rep.I1 + rep.I2);
  return rep;
}

// ---------------------------------------------------------------------------
// gamma = -2 critical split
// ---------------------------------------------------------------------------

CriticalSplit critical_split(const ScalarField& f, const ScalarField& phi, double R1) {
  require_same_grid(f, phi);
  const GridSpec& g = f.grid;
  require_pair_grid(g);
  if (g.d != 3) throw std::invalid_argument("critical_split: the gamma = -2 route needs d = 3");
  if (!(R1 > 0.0)) throw std::invalid_argument("critical_split: R1 must be positive");

  const PairTables tab = make_pair_tables(g, -2.0);
  const auto coords = integer_coords(g);
  const std::size_t cells = static_cast<std::size_t>(g.cells);

  std::vector<double> F(cells), psi2(cells);
  std::vector<double> fw(cells);  // f <v>^2 for ||f||_{L^1_2}
  cellwise(g, [&](std::size_t id, const std::array<double, 3>& v) {
    const double w2 = bracket2(v, g.d);
    const double fp = std::max(f.v[id], 0.0);
    F[id] = w2 * fp;
    fw[id] = w2 * fp;
    psi2[id] = sq(phi.v[id]) / w2;
  });
  std::vector<std::size_t> supp;
  for (std::size_t j = 0; j < cells; ++j)
    if (F[j] > 0.0) supp.push_back(j);

  double J1 = 0.0, J2m = 0.0, J2p = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    if (psi2[i] == 0.0) continue;
    double s1 = 0.0, sm = 0.0, sp = 0.0;
    for (std::size_t j : supp) {
      const std::size_t off = tab.index(coords[i], coords[j], g.d);
      const double contrib = F[j] * tab.kpow[off];
      if (tab.r2[off] > 1.0) {
        s1 += contrib;
      } else if (F[j] > R1) {
        sp += contrib;
      } else {
        sm += contrib;
      }
    }
    J1 += psi2[i] * s1;
    J2m += psi2[i] * sm;
    J2p += psi2[i] * sp;
  }
  const double h2d = sq(g.cell_volume());
  CriticalSplit rep;
  rep.J1 = J1 * h2d;
  rep.J2_minus = J2m * h2d;
  rep.J2_plus = J2p * h2d;
  rep.C_d = 4.0 * kPi;  // |S^2| / (d - 2)
  const double psi_l2 = cell_integral(g, psi2);
  rep.J1_bound = cell_integral(g, fw) * psi_l2;
  rep.J2_minus_bound = rep.C_d * R1 * psi_l2;
  double lk = 0.0;
  for (std::size_t o = 0; o < tab.r2.size(); ++o)
    if (tab.r2[o] <= 1.0) lk += tab.kpow[o];
  rep.lattice_kernel_mass = lk * g.cell_volume();
  return rep;
}

// ---------------------------------------------------------------------------
// Tail bound and explicit thresholds
// ---------------------------------------------------------------------------

TailBound tail_bound_check(const ScalarField& f, double R1, double R2, double s) {
  const GridSpec& g = f.grid;
  if (!(s > 2.0)) throw std::invalid_argument("tail_bound_check: s must exceed 2");
  if (!(R1 >= 4.0)) throw std::invalid_argument("tail_bound_check: R1 below the valid range (>= 4)");
  if (!(R2 > 0.0)) throw std::invalid_argument("tail_bound_check: R2 must be positive");

  TailBound rep;
  std::vector<double> lhs_buf(f.v.size(), 0.0);
  cellwise(g, [&](std::size_t id, const std::array<double, 3>& v) {
    const double fp = std::max(f.v[id], 0.0);
    const double F = bracket2(v, g.d) * fp;
    lhs_buf[id] = (F > R1) ? F : 0.0;
  });
  rep.lhs = cell_integral(g, lhs_buf);
  rep.h_plus = entropy_positive_part(f);
  rep.m2 = raw_moment(f, 2.0);
  rep.m_psi = raw_moment(f, s);
  rep.term_entropy = 2.0 * (1.0 + R2) / std::log(R1) * rep.h_plus;
  rep.term_energy = rep.m2 / R2;
  rep.term_psi_R2 = rep.m_psi * std::pow(R2, 0.5 * (2.0 - s));
  rep.term_psi_R1 = 2.0 * rep.m_psi * std::pow(std::sqrt(R1) - 1.0, 0.5 * (2.0 - s));
  rep.rhs = rep.term_entropy + rep.term_energy + rep.term_psi_R2 + rep.term_psi_R1;
  return rep;
}

TailThresholds tail_thresholds(const ScalarField& f, double s, double eps, double C_tilde) {
  if (!(s > 2.0)) throw std::invalid_argument("tail_thresholds: s must exceed 2");
  if (!(eps > 0.0) || !(C_tilde > 0.0))
    throw std::invalid_argument("tail_thresholds: eps and C_tilde must be positive");
  const double m2 = raw_moment(f, 2.0);
  const double m_psi = raw_moment(f, s);
  const double h_plus = entropy_positive_part(f);
  const double e2 = 2.0 / (s - 2.0);
  TailThresholds out;
  out.R2 = std::max(4.0 * C_tilde / eps * m2, std::pow(4.0 * C_tilde / eps * m_psi, e2));
  out.R1 = std::max({4.0, std::exp(8.0 * C_tilde * (1.0 + out.R2) / eps * h_plus),
                     sq(std::pow(8.0 * C_tilde / eps * m_psi, e2) + 1.0)});
  return out;
}

// ---------------------------------------------------------------------------
// HLS alternative for the singular region (d = 3)
// ---------------------------------------------------------------------------

HlsReport hls_singular_check(const ScalarField& f, const ScalarField& phi, double R, double s) {
  require_same_grid(f, phi);
  const GridSpec& g = f.grid;
  require_pair_grid(g);
  if (g.d != 3) throw std::invalid_argument("hls_singular_check: d = 3 only");
  if (!(R >= 1.0)) throw std::invalid_argument("hls_singular_check: R must be >= 1");
  if (!(s > 2.0)) throw std::invalid_argument("hls_singular_check: s must exceed 2");

  const PairTables tab = make_pair_tables(g, -2.0);
  const auto coords = integer_coords(g);
  const std::size_t cells = static_cast<std::size_t>(g.cells);

  std::vector<double> fpos(cells), phi2(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    fpos[i] = std::max(f.v[i], 0.0);
    phi2[i] = sq(phi.v[i]);
  }
  std::vector<std::size_t> supp;  // cells above the level
  for (std::size_t j = 0; j < cells; ++j)
    if (fpos[j] > R) supp.push_back(j);

  double JR = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    if (phi2[i] == 0.0) continue;
    double acc = 0.0;
    for (std::size_t j : supp) {
      const std::size_t off = tab.index(coords[i], coords[j], g.d);
      if (tab.r2[off] <= 1.0) acc += fpos[j] * tab.kpow[off];
    }
    JR += phi2[i] * acc;
  }
  HlsReport rep;
  rep.J_R = JR * sq(g.cell_volume());

  std::vector<double> cut(cells, 0.0);
  for (std::size_t j : supp) cut[j] = fpos[j];
  std::vector<double> b2(cells), absphi(cells);
  cellwise(g, [&](std::size_t id, const std::array<double, 3>& v) {
    b2[id] = bracket2(v, g.d);
    absphi[id] = std::abs(phi.v[id]);
  });
  const double p94 = 9.0 / 4.0;
  const double norm_cut = weighted_lp(g, cut, b2, 0.0, p94);
  const double norm_phi = weighted_lp(g, absphi, b2, 0.0, p94);
  rep.bound_product = norm_cut * sq(norm_phi);
  rep.implied_C = (rep.bound_product > 0.0) ? rep.J_R / rep.bound_product : 0.0;

  const double theta = 1.0 - 2.0 / s;
  const double logR = std::log(R);
  if (logR <= 0.0) {
    rep.chained_bound = kInf;
    return rep;
  }
  std::vector<double> ent(cells);
  for (std::size_t i = 0; i < cells; ++i)
    ent[i] = (fpos[i] > 0.0) ? std::abs(fpos[i] * std::log(fpos[i])) : 0.0;
  const double m_s = weighted_lp(g, fpos, b2, s, 1.0);
  const double ent_l1 = cell_integral(g, ent);
  const double phi_w1 = weighted_lp(g, absphi, b2, 2.0, 1.0);
  const double f_w6 = weighted_lp(g, fpos, b2, -1.0, 6.0);
  const double phi_w6 = weighted_lp(g, absphi, b2, -1.0, 6.0);
  rep.chained_bound = std::pow(logR, -theta / 3.0) * std::pow(m_s, (1.0 - theta) / 3.0) *
                      std::pow(ent_l1, theta / 3.0) * std::pow(phi_w1, 2.0 / 3.0) *
                      std::pow(f_w6, 2.0 / 3.0) * std::pow(phi_w6, 4.0 / 3.0);
  return rep;
}

// ---------------------------------------------------------------------------
// Level-change interpolation inequalities
// ---------------------------------------------------------------------------

LevelCheck level_inequality_check(const ScalarField& f, double k, double ell,
                                  LevelInequality which, double gamma, double param) {
  const GridSpec& g = f.grid;
  const double d = static_cast<double>(g.d);
  if (!(k >= 0.0) || !(ell > k))
    throw std::invalid_argument("level_inequality_check: need 0 <= k < ell");

  ScalarField fk = level_truncate(f, k);
  ScalarField fl = level_truncate(f, ell);
  const std::size_t cells = static_cast<std::size_t>(g.cells);
  std::vector<double> b2(cells);
  cellwise(g, [&](std::size_t id, const std::array<double, 3>& v) { b2[id] = bracket2(v, g.d); });

  auto grad2w = [&](const ScalarField& field, double w) {
    ScalarField t = make_scalar(g);
    for (std::size_t i = 0; i < cells; ++i) t.v[i] = std::pow(b2[i], 0.5 * w) * field.v[i];
    return gradient_sq_integral(t);
  };
  auto wint = [&](const ScalarField& field, double a, double p) {
    std::vector<double> buf(cells);
    for (std::size_t i = 0; i < cells; ++i)
      buf[i] = std::pow(b2[i], 0.5 * a) * std::pow(field.v[i], p);
    return cell_integral(g, buf);
  };

  const double gap = ell - k;
  const double l2k = wint(fk, 0.0, 2.0);
  LevelCheck rep;
  switch (which) {
    case LevelInequality::L2: {
      rep.lhs = wint(fl, gamma, 2.0);
      rep.rhs0 = std::pow(gap, -4.0 / d) * grad2w(fk, 0.5 * gamma) * std::pow(l2k, 2.0 / d);
      break;
    }
    case LevelInequality::Lp: {
      const double p = param;
      const double p_max = (g.d == 2) ? kInf : d / (d - 2.0);
      if (!(p >= 1.0) || !(p < p_max))
        throw std::invalid_argument("level_inequality_check: p outside [1, d/(d-2))");
      rep.lhs = std::pow(wint(fl, gamma * p, p), 1.0 / p);
      rep.rhs0 = std::pow(gap, -(2.0 / p - (d - 4.0) / d)) * grad2w(fk, 0.5 * gamma) *
                 std::pow(l2k, 0.5 * (2.0 / p + (4.0 - 2.0 * d) / d));
      break;
    }
    case LevelInequality::Lq: {
      const double q = param;
      if (!(q > (2.0 * d + 2.0) / d) || !(q < (2.0 * d + 4.0) / d))
        throw std::invalid_argument(
            "level_inequality_check: q outside ((2d+2)/d, (2d+4)/d)");
      const double s = -gamma * d / (2.0 * d + 4.0 - q * d);
      rep.lhs = wint(fl, 0.0, 2.0);
      rep.rhs0 = std::pow(gap, -(q - 2.0)) * std::pow(wint(fk, s, 1.0), (2.0 * d + 4.0) / d - q) *
                 std::pow(l2k, q - (2.0 * d + 2.0) / d) * grad2w(fk, 0.5 * gamma);
      break;
    }
    case LevelInequality::Ld: {
      const double s = param;
      if (!(s > 2.0)) throw std::invalid_argument("level_inequality_check: s must exceed 2");
      const double pd = d / (d - 1.0);
      rep.lhs = std::pow(wint(fl, 0.0, pd), 2.0 / pd);
      rep.rhs0 = std::pow(gap, -2.0 * (s - 1.0) / s) * std::pow(wint(fk, s, 1.0), 2.0 / s) *
                 std::pow(l2k, (s - 2.0) / s) * grad2w(fk, -1.0);
      break;
    }
  }
  if (rep.lhs == 0.0) {
    rep.implied_constant = 0.0;
  } else if (rep.rhs0 > 0.0) {
    rep.implied_constant = rep.lhs / rep.rhs0;
  } else {
    rep.implied_constant = kInf;
  }
  return rep;
}

}  // namespace landau
