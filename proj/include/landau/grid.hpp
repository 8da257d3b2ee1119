#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace landau {

/**
 * Cell-centered uniform velocity grid on [-half_width, half_width]^d.
 *
 * Node k sits at v_i = -half_width + (k_i + 1/2) h with h = 2*half_width/n,
 * so no node lies on the boundary or at the origin. Fields are stored
 * row-major, last axis fastest. Every field is extended by zero outside the
 * box; all difference operators below assume that extension.
 */
struct GridSpec {
  int d = 3;
  int n = 0;
  double half_width = 0.0;
  double h = 0.0;
  std::int64_t cells = 0;

  // Coordinate of a node along one axis.
  double coord(int index) const { return -half_width + (index + 0.5) * h; }

  double cell_volume() const {
    double v = h;
    for (int a = 1; a < d; ++a) v *= h;
    return v;
  }

  std::int64_t flat(const std::array<int, 3>& idx) const {
    std::int64_t f = idx[0];
    for (int a = 1; a < d; ++a) f = f * n + idx[a];
    return f;
  }

  std::array<int, 3> unflat(std::int64_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % n);
      flat /= n;
    }
    return idx;
  }

  std::array<double, 3> node(std::int64_t flat) const {
    auto idx = unflat(flat);
    std::array<double, 3> v{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) v[a] = coord(idx[a]);
    return v;
  }

  bool same_shape(const GridSpec& o) const {
    return d == o.d && n == o.n && half_width == o.half_width;
  }
};

// Rejects d outside {2,3}, odd or tiny n, nonpositive half_width.
GridSpec make_grid(int d, int n, double half_width);

// same_shape as a free predicate (member forwarding, reads better at call sites)
inline bool same_shape(const GridSpec& a, const GridSpec& b) { return a.same_shape(b); }

// Radius of the d-ball whose volume equals one grid cell; every singular
// kernel replaces its origin-cell value by an exact mean over this ball.
double equal_volume_ball_radius(const GridSpec& g);

struct ScalarField {
  GridSpec grid;
  std::vector<double> v;
};

// comp[a] is the a-th Cartesian component; only the first grid.d are used.
struct VectorField {
  GridSpec grid;
  std::array<std::vector<double>, 3> comp;
};

// Symmetric matrix field. d=3 layout: xx, yy, zz, xy, xz, yz (first 6 slots);
// d=2 layout: xx, yy, xy (first 3 slots).
struct MatrixField {
  GridSpec grid;
  std::array<std::vector<double>, 6> comp;
};

ScalarField make_scalar(const GridSpec& g);
VectorField make_vector(const GridSpec& g);
MatrixField make_matrix(const GridSpec& g);

// Slot of component (i,j) in the MatrixField layout.
int sym_index(int i, int j, int d);
int matrix_components(int d);
int vector_components(int d);

// Deterministic chunked-pairwise sum: the result is independent of thread
// count, so reports stay byte-identical under LANDAU_THREADS changes.
double det_sum(const double* x, std::int64_t count);
double det_sum(const std::vector<double>& x);

// Midpoint quadrature of f * <v>^s with <v> = sqrt(1 + |v|^2).
double integrate(const ScalarField& f, double s = 0.0);

// Midpoint quadrature of f * |v|^k (raw moment weight).
double raw_moment(const ScalarField& f, double k);

// Midpoint quadrature of f * v_axis (signed first moment along one axis).
double axis_moment(const ScalarField& f, int axis);

// h^d * sum(f*g).
double inner(const ScalarField& f, const ScalarField& g);

// Second-order centered difference per axis with zero extension.
VectorField gradient(const ScalarField& f);

// Centered-difference divergence, the exact negative adjoint of gradient()
// under the midpoint inner product with zero extension.
ScalarField divergence(const VectorField& u);

// h^d * sum over cells of |grad f|^2 evaluated from gradient().
double gradient_sq_integral(const ScalarField& f);

}  // namespace landau
