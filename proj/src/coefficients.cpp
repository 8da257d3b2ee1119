#include "landau/coefficients.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace landau {

namespace {

constexpr double kPi = 3.14159265358979323846;

int component_slot(KernelComponent c) { return static_cast<int>(c); }

}  // namespace

KernelSet::KernelSet(const GridSpec& g, double gamma)
    : grid_(g), gamma_(gamma), rho_(equal_volume_ball_radius(g)), conv_(g) {
  if (!(gamma >= -2.0 && gamma < 0.0))
    throw std::invalid_argument("KernelSet: gamma must lie in [-2, 0)");
}

double KernelSet::table_value(KernelComponent c, const std::array<double, 3>& z) const {
  const int d = grid_.d;
  const double r2 = z[0] * z[0] + z[1] * z[1] + (d == 3 ? z[2] * z[2] : 0.0);

  auto a_entry = [&](int i, int j) {
    if (r2 == 0.0) return i == j ? (d - 1) / static_cast<double>(d) *
                                       std::pow(rho_, gamma_ + 2.0)
                                 : 0.0;
    const double rg = std::pow(r2, 0.5 * gamma_);  // |z|^gamma
    const double delta = i == j ? 1.0 : 0.0;
    return rg * (r2 * delta - z[i] * z[j]);
  };
  auto b_entry = [&](int i) {
    if (r2 == 0.0) return 0.0;
    return -(d - 1) * z[i] * std::pow(r2, 0.5 * gamma_);
  };
  auto c_entry = [&](double lambda) {
    if (lambda + d <= 0.0)
      throw std::invalid_argument("KernelSet: c_lambda needs lambda + d > 0");
    if (r2 == 0.0)
      return -(d - 1) * (lambda + d) * (d / (d + lambda)) * std::pow(rho_, lambda);
    return -(d - 1) * (lambda + d) * std::pow(r2, 0.5 * lambda);
  };

  switch (c) {
    case KernelComponent::A_xx: return a_entry(0, 0);
    case KernelComponent::A_yy: return a_entry(1, 1);
    case KernelComponent::A_zz:
      if (d != 3) throw std::invalid_argument("KernelSet: A_zz needs d=3");
      return a_entry(2, 2);
    case KernelComponent::A_xy: return a_entry(0, 1);
    case KernelComponent::A_xz:
      if (d != 3) throw std::invalid_argument("KernelSet: A_xz needs d=3");
      return a_entry(0, 2);
    case KernelComponent::A_yz:
      if (d != 3) throw std::invalid_argument("KernelSet: A_yz needs d=3");
      return a_entry(1, 2);
    case KernelComponent::B_x: return b_entry(0);
    case KernelComponent::B_y: return b_entry(1);
    case KernelComponent::B_z:
      if (d != 3) throw std::invalid_argument("KernelSet: B_z needs d=3");
      return b_entry(2);
    case KernelComponent::C_gamma: return c_entry(gamma_);
    case KernelComponent::C_gamma_plus_1: return c_entry(gamma_ + 1.0);
    case KernelComponent::Trace:
      if (r2 == 0.0) return (d - 1) * std::pow(rho_, gamma_ + 2.0);
      return (d - 1) * std::pow(r2, 0.5 * (gamma_ + 2.0));
  }
  throw std::logic_error("KernelSet: unknown component");
}

const KernelSpectrum& KernelSet::spectrum_locked(KernelComponent c) {
  auto& slot = spectra_[component_slot(c)];
  if (!slot) {
    // Validate admissibility before any FFT work (c_lambda may be rejected).
    table_value(c, {0.0, 0.0, 0.0});
    slot = std::make_unique<KernelSpectrum>(
        conv_.kernel_spectrum([&](const std::array<double, 3>& z) { return table_value(c, z); }));
  }
  return *slot;
}

ScalarField KernelSet::convolve(KernelComponent c, const ScalarField& f) {
  std::lock_guard<std::mutex> lock(mu_);
  const KernelSpectrum& ks = spectrum_locked(c);
  conv_.load(f);
  return conv_.apply(ks);
}

VectorField KernelSet::conv_rows(const VectorField& w) {
  std::lock_guard<std::mutex> lock(mu_);
  return conv_rows_locked(w);
}

VectorField KernelSet::conv_rows_locked(const VectorField& w) {
  const int d = grid_.d;
  static constexpr KernelComponent kRow3[3][3] = {
      {KernelComponent::A_xx, KernelComponent::A_xy, KernelComponent::A_xz},
      {KernelComponent::A_xy, KernelComponent::A_yy, KernelComponent::A_yz},
      {KernelComponent::A_xz, KernelComponent::A_yz, KernelComponent::A_zz}};
  static constexpr KernelComponent kRow2[2][2] = {
      {KernelComponent::A_xx, KernelComponent::A_xy},
      {KernelComponent::A_xy, KernelComponent::A_yy}};

  std::array<KernelSpectrum, 3> ws;
  for (int l = 0; l < d; ++l) {
    ScalarField comp = make_scalar(grid_);
    comp.v = w.comp[l];
    ws[static_cast<std::size_t>(l)] = conv_.field_spectrum(comp);
  }
  std::array<const KernelSpectrum*, 3> wp{nullptr, nullptr, nullptr};
  for (int l = 0; l < d; ++l) wp[static_cast<std::size_t>(l)] = &ws[static_cast<std::size_t>(l)];

  VectorField out = make_vector(grid_);
  for (int k = 0; k < d; ++k) {
    std::array<const KernelSpectrum*, 3> row{nullptr, nullptr, nullptr};
    for (int l = 0; l < d; ++l)
      row[static_cast<std::size_t>(l)] = &spectrum_locked(d == 3 ? kRow3[k][l] : kRow2[k][l]);
    out.comp[k] = conv_.apply_pairs(row, wp).v;
  }
  return out;
}

CoefficientSet KernelSet::coefficients(const ScalarField& f, bool with_c, bool with_beta) {
  std::lock_guard<std::mutex> lock(mu_);
  const int d = grid_.d;

  CoefficientSet out;
  out.A = make_matrix(grid_);

  static constexpr KernelComponent kA3[6] = {KernelComponent::A_xx, KernelComponent::A_yy,
                                             KernelComponent::A_zz, KernelComponent::A_xy,
                                             KernelComponent::A_xz, KernelComponent::A_yz};
  static constexpr KernelComponent kA2[3] = {KernelComponent::A_xx, KernelComponent::A_yy,
                                             KernelComponent::A_xy};
  static constexpr KernelComponent kB[3] = {KernelComponent::B_x, KernelComponent::B_y,
                                            KernelComponent::B_z};

  conv_.load(f);
  const int na = matrix_components(d);
  for (int c = 0; c < na; ++c)
    out.A.comp[c] = conv_.apply(spectrum_locked(d == 3 ? kA3[c] : kA2[c])).v;
  if (with_c) {
    out.b = make_vector(grid_);
    for (int a = 0; a < d; ++a) out.b.comp[a] = conv_.apply(spectrum_locked(kB[a])).v;
    out.c_gamma = conv_.apply(spectrum_locked(KernelComponent::C_gamma));
    out.c_gamma1 = conv_.apply(spectrum_locked(KernelComponent::C_gamma_plus_1));
    out.has_c = true;
  }
  if (with_beta) {
    out.beta = conv_rows_locked(gradient(f));
    out.has_beta = true;
  }
  return out;
}

namespace {

using CacheKey = std::tuple<int, int, double, double>;

std::map<CacheKey, std::unique_ptr<KernelSet>>& cache_map() {
  static std::map<CacheKey, std::unique_ptr<KernelSet>> cache;
  return cache;
}

std::mutex& cache_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

KernelSet& kernel_cache(const GridSpec& g, double gamma) {
  std::lock_guard<std::mutex> lock(cache_mutex());
  CacheKey key{g.d, g.n, g.half_width, gamma};
  auto& cache = cache_map();
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<KernelSet>(g, gamma)).first;
  return *it->second;
}

// Frees all cached kernel spectra. References obtained from kernel_cache()
// must not be used across a clear.
void clear_kernel_cache() {
  std::lock_guard<std::mutex> lock(cache_mutex());
  cache_map().clear();
}

double lambda_min_sym(const std::array<double, 6>& m, int d) {
  if (d == 2) {
    const double a = m[0], c = m[1], b = m[2];
    const double mid = 0.5 * (a + c);
    const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    return mid - rad;
  }
  const double a00 = m[0], a11 = m[1], a22 = m[2];
  const double a01 = m[3], a02 = m[4], a12 = m[5];
  const double p1 = a01 * a01 + a02 * a02 + a12 * a12;
  if (p1 == 0.0) return std::min(a00, std::min(a11, a22));
  const double q = (a00 + a11 + a22) / 3.0;
  const double p2 = (a00 - q) * (a00 - q) + (a11 - q) * (a11 - q) + (a22 - q) * (a22 - q) +
                    2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const double b00 = (a00 - q) / p, b11 = (a11 - q) / p, b22 = (a22 - q) / p;
  const double b01 = a01 / p, b02 = a02 / p, b12 = a12 / p;
  double detB = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) +
                b02 * (b01 * b12 - b11 * b02);
  double r = detB / 2.0;
  r = std::max(-1.0, std::min(1.0, r));
  const double phi = std::acos(r) / 3.0;
  // Smallest eigenvalue corresponds to phi + 2*pi/3.
  return q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
}

double lambda_max_sym(const std::array<double, 6>& m, int d) {
  if (d == 2) {
    const double a = m[0], c = m[1], b = m[2];
    const double mid = 0.5 * (a + c);
    const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    return mid + rad;
  }
  std::array<double, 6> neg;
  for (int i = 0; i < 6; ++i) neg[i] = -m[i];
  return -lambda_min_sym(neg, d);
}

namespace {

std::array<double, 6> cell_matrix(const CoefficientSet& coeffs, std::int64_t id, int d) {
  std::array<double, 6> m{0, 0, 0, 0, 0, 0};
  const int na = matrix_components(d);
  for (int c = 0; c < na; ++c) m[c] = coeffs.A.comp[c][static_cast<std::size_t>(id)];
  if (d == 2) {
    // reorder (xx, yy, xy) into the 2x2 convention (a, c, b)
    return {m[0], m[1], m[2], 0, 0, 0};
  }
  return m;
}

}  // namespace

SpectralStats spectral_stats(const CoefficientSet& coeffs, double gamma) {
  const GridSpec& g = coeffs.A.grid;
  double amax = 0.0;
  const int na = matrix_components(g.d);
  for (int c = 0; c < na; ++c)
    for (double x : coeffs.A.comp[c]) amax = std::max(amax, std::abs(x));
  const double tol = 1e-12 * std::max(1.0, amax);

  double k0 = std::numeric_limits<double>::infinity();
  double lmax = 0.0;
  bool not_psd = false;
#pragma omp parallel
  {
    double local_k0 = std::numeric_limits<double>::infinity();
    double local_max = 0.0;
    bool local_bad = false;
#pragma omp for schedule(static) nowait
    for (std::int64_t id = 0; id < g.cells; ++id) {
      const auto m = cell_matrix(coeffs, id, g.d);
      local_max = std::max(local_max, lambda_max_sym(m, g.d));
      const double lmin = lambda_min_sym(m, g.d);
      if (lmin < -tol) {
        local_bad = true;
        continue;
      }
      const auto v = g.node(id);
      const double w2 = 1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
      local_k0 = std::min(local_k0, std::max(lmin, 0.0) / std::pow(w2, 0.5 * gamma));
    }
#pragma omp critical
    {
      k0 = std::min(k0, local_k0);
      lmax = std::max(lmax, local_max);
      not_psd = not_psd || local_bad;
    }
  }
  return SpectralStats{not_psd ? 0.0 : k0, lmax};
}

double estimate_K0(const CoefficientSet& coeffs, double gamma) {
  return spectral_stats(coeffs, gamma).k0;
}

double max_lambda_A(const CoefficientSet& coeffs) {
  // gamma only affects k0; any admissible value works for the lambda scan
  return spectral_stats(coeffs, -1.0).lambda_max;
}

}  // namespace landau
