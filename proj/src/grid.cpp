#include "landau/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace landau {

GridSpec make_grid(int d, int n, double half_width) {
  if (d != 2 && d != 3) throw std::invalid_argument("make_grid: d must be 2 or 3");
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("make_grid: n must be even and >= 4");
  if (!(half_width > 0.0)) throw std::invalid_argument("make_grid: half_width must be positive");
  GridSpec g;
  g.d = d;
  g.n = n;
  g.half_width = half_width;
  g.h = 2.0 * half_width / n;
  g.cells = 1;
  for (int a = 0; a < d; ++a) g.cells *= n;
  return g;
}

double equal_volume_ball_radius(const GridSpec& g) {
  constexpr double pi = 3.14159265358979323846;
  return g.d == 3 ? g.h * std::cbrt(3.0 / (4.0 * pi)) : g.h / std::sqrt(pi);
}

ScalarField make_scalar(const GridSpec& g) {
  ScalarField f;
  f.grid = g;
  f.v.assign(static_cast<std::size_t>(g.cells), 0.0);
  return f;
}

VectorField make_vector(const GridSpec& g) {
  VectorField u;
  u.grid = g;
  for (int a = 0; a < g.d; ++a) u.comp[a].assign(static_cast<std::size_t>(g.cells), 0.0);
  return u;
}

MatrixField make_matrix(const GridSpec& g) {
  MatrixField m;
  m.grid = g;
  for (int c = 0; c < matrix_components(g.d); ++c)
    m.comp[c].assign(static_cast<std::size_t>(g.cells), 0.0);
  return m;
}

int vector_components(int d) { return d; }

int matrix_components(int d) { return d == 3 ? 6 : 3; }

int sym_index(int i, int j, int d) {
  if (i > j) std::swap(i, j);
  if (d == 3) {
    if (i == j) return i;            // xx, yy, zz
    if (i == 0 && j == 1) return 3;  // xy
    if (i == 0 && j == 2) return 4;  // xz
    return 5;                        // yz
  }
  if (i == j) return i;  // xx, yy
  return 2;              // xy
}

double det_sum(const double* x, std::int64_t count) {
  // Fixed chunking; the combine order never depends on thread count.
  constexpr std::int64_t kChunk = 4096;
  const std::int64_t nchunks = (count + kChunk - 1) / kChunk;
  if (nchunks <= 1) {
    double s = 0.0;
    for (std::int64_t i = 0; i < count; ++i) s += x[i];
    return s;
  }
  std::vector<double> partial(static_cast<std::size_t>(nchunks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::int64_t lo = c * kChunk;
    const std::int64_t hi = std::min(count, lo + kChunk);
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += x[i];
    partial[static_cast<std::size_t>(c)] = s;
  }
  // Pairwise reduction of the partials, fixed order.
  std::size_t m = partial.size();
  while (m > 1) {
    std::size_t half = (m + 1) / 2;
    for (std::size_t i = 0; i + half < m; ++i) partial[i] += partial[i + half];
    m = half;
  }
  return partial[0];
}

double det_sum(const std::vector<double>& x) {
  return det_sum(x.data(), static_cast<std::int64_t>(x.size()));
}

namespace {

// Applies op(cell_value, node) over all cells into an accumulation buffer,
// then det_sum. Weight evaluation stays in the loop so no temporary field of
// coordinates is ever materialized.
template <typename Weight>
double weighted_sum(const ScalarField& f, Weight&& w) {
  const GridSpec& g = f.grid;
  std::vector<double> acc(static_cast<std::size_t>(g.cells));
  const int n = g.n;
  if (g.d == 3) {
#pragma omp parallel for schedule(static)
    for (int ix = 0; ix < n; ++ix) {
      const double x = g.coord(ix);
      std::int64_t base = static_cast<std::int64_t>(ix) * n * n;
      for (int iy = 0; iy < n; ++iy) {
        const double y = g.coord(iy);
        for (int iz = 0; iz < n; ++iz) {
          const double z = g.coord(iz);
          const std::int64_t id = base + static_cast<std::int64_t>(iy) * n + iz;
          acc[static_cast<std::size_t>(id)] = f.v[static_cast<std::size_t>(id)] * w(x, y, z);
        }
      }
    }
  } else {
#pragma omp parallel for schedule(static)
    for (int ix = 0; ix < n; ++ix) {
      const double x = g.coord(ix);
      std::int64_t base = static_cast<std::int64_t>(ix) * n;
      for (int iy = 0; iy < n; ++iy) {
        const double y = g.coord(iy);
        acc[static_cast<std::size_t>(base + iy)] =
            f.v[static_cast<std::size_t>(base + iy)] * w(x, y, 0.0);
      }
    }
  }
  double hv = 1.0;
  for (int a = 0; a < g.d; ++a) hv *= g.h;
  return hv * det_sum(acc);
}

}  // namespace

double integrate(const ScalarField& f, double s) {
  if (s == 0.0) {
    double hv = 1.0;
    for (int a = 0; a < f.grid.d; ++a) hv *= f.grid.h;
    return hv * det_sum(f.v);
  }
  const double half = 0.5 * s;
  return weighted_sum(f, [half](double x, double y, double z) {
    return std::pow(1.0 + x * x + y * y + z * z, half);
  });
}

double raw_moment(const ScalarField& f, double k) {
  const double half = 0.5 * k;
  return weighted_sum(f, [half](double x, double y, double z) {
    return std::pow(x * x + y * y + z * z, half);
  });
}

double axis_moment(const ScalarField& f, int axis) {
  if (axis < 0 || axis >= f.grid.d) throw std::invalid_argument("axis_moment: bad axis");
  return weighted_sum(f, [axis](double x, double y, double z) {
    return axis == 0 ? x : (axis == 1 ? y : z);
  });
}

double inner(const ScalarField& f, const ScalarField& g) {
  if (!f.grid.same_shape(g.grid)) throw std::invalid_argument("inner: grid mismatch");
  std::vector<double> acc(f.v.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(f.v.size()); ++i)
    acc[static_cast<std::size_t>(i)] =
        f.v[static_cast<std::size_t>(i)] * g.v[static_cast<std::size_t>(i)];
  double hv = 1.0;
  for (int a = 0; a < f.grid.d; ++a) hv *= f.grid.h;
  return hv * det_sum(acc);
}

VectorField gradient(const ScalarField& f) {
  const GridSpec& g = f.grid;
  VectorField out = make_vector(g);
  const int n = g.n;
  const double inv2h = 1.0 / (2.0 * g.h);
  // stride of each axis in the flat layout
  std::int64_t stride[3] = {0, 0, 0};
  stride[g.d - 1] = 1;
  for (int a = g.d - 2; a >= 0; --a) stride[a] = stride[a + 1] * n;

  for (int a = 0; a < g.d; ++a) {
    const std::int64_t st = stride[a];
    double* dst = out.comp[a].data();
    const double* src = f.v.data();
#pragma omp parallel for schedule(static)
    for (std::int64_t id = 0; id < g.cells; ++id) {
      const int pos = static_cast<int>((id / st) % n);
      const double up = (pos + 1 < n) ? src[id + st] : 0.0;
      const double dn = (pos > 0) ? src[id - st] : 0.0;
      dst[id] = (up - dn) * inv2h;
    }
  }
  return out;
}

ScalarField divergence(const VectorField& u) {
  const GridSpec& g = u.grid;
  ScalarField out = make_scalar(g);
  const int n = g.n;
  const double inv2h = 1.0 / (2.0 * g.h);
  std::int64_t stride[3] = {0, 0, 0};
  stride[g.d - 1] = 1;
  for (int a = g.d - 2; a >= 0; --a) stride[a] = stride[a + 1] * n;

  for (int a = 0; a < g.d; ++a) {
    const std::int64_t st = stride[a];
    const double* src = u.comp[a].data();
    double* dst = out.v.data();
#pragma omp parallel for schedule(static)
    for (std::int64_t id = 0; id < g.cells; ++id) {
      const int pos = static_cast<int>((id / st) % n);
      const double up = (pos + 1 < n) ? src[id + st] : 0.0;
      const double dn = (pos > 0) ? src[id - st] : 0.0;
      dst[id] += (up - dn) * inv2h;
    }
  }
  return out;
}

double gradient_sq_integral(const ScalarField& f) {
  VectorField gr = gradient(f);
  const GridSpec& g = f.grid;
  std::vector<double> acc(static_cast<std::size_t>(g.cells), 0.0);
  for (int a = 0; a < g.d; ++a) {
    const double* c = gr.comp[a].data();
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < g.cells; ++i)
      acc[static_cast<std::size_t>(i)] += c[i] * c[i];
  }
  double hv = 1.0;
  for (int a = 0; a < g.d; ++a) hv *= g.h;
  return hv * det_sum(acc);
}

}  // namespace landau
