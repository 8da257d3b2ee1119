#pragma once

#include <array>
#include <memory>
#include <mutex>

#include "landau/fft_conv.hpp"
#include "landau/grid.hpp"

namespace landau {

// Scalar kernels the collision operator is built from. Matrix kernel
// a_ij(z) = |z|^{gamma+2} (delta_ij - z_i z_j / |z|^2), drift kernel
// b_i(z) = -(d-1) z_i |z|^gamma, potential kernels
// c_lambda(z) = -(d-1)(lambda+d) |z|^lambda for lambda in {gamma, gamma+1},
// and the trace (d-1)|z|^{gamma+2} of a.
enum class KernelComponent {
  A_xx, A_yy, A_zz, A_xy, A_xz, A_yz,
  B_x, B_y, B_z,
  C_gamma, C_gamma_plus_1,
  Trace,
};

struct CoefficientSet {
  MatrixField A;        // a * f
  VectorField b;        // b * f (with has_c)
  ScalarField c_gamma;  // c_gamma * f (with has_c)
  ScalarField c_gamma1;
  // a * grad f: the drift field in integrated-by-parts form. Analytically
  // equal to b * f (b = div a), but discretely it pairs with the centered
  // gradient so that the collision operator's mass/momentum/energy sums
  // cancel by the antisymmetry of the pair form.
  VectorField beta;
  bool has_c = false;
  bool has_beta = false;
};

/**
 * Kernel tables for one (grid, gamma) pair with cached spectra.
 *
 * The singular cell z = 0 is regularized by equal-volume ball averages with
 * rho = h (3/(4pi))^(1/3) in d=3 and rho = h/sqrt(pi) in d=2:
 *   a(0)        = ((d-1)/d) rho^{gamma+2} Id
 *   b(0)        = 0
 *   c_lambda(0) = -(d-1)(lambda+d) (d/(d+lambda)) rho^lambda
 * All tables are exactly parity-symmetric, which the solver's discrete
 * momentum conservation relies on.
 *
 * Spectra are built lazily per component; all FFT work is serialized on an
 * internal mutex, so a KernelSet may be shared across threads.
 */
class KernelSet {
 public:
  KernelSet(const GridSpec& g, double gamma);

  const GridSpec& grid() const { return grid_; }
  double gamma() const { return gamma_; }
  double rho() const { return rho_; }

  // Exact table value at lattice offset z (including the regularized origin).
  double table_value(KernelComponent c, const std::array<double, 3>& z) const;

  // h^d-weighted lattice convolution of f with one kernel component.
  ScalarField convolve(KernelComponent c, const ScalarField& f);

  // Row convolutions (a * w)_k = sum_l a_kl * w_l of a vector field w with
  // the matrix kernel: d forward transforms and d fused inverse ones.
  VectorField conv_rows(const VectorField& w);

  // A (and b, c_lambda when with_c) from one forward FFT of f. beta (with
  // with_beta) is conv_rows of the centered zero-extension gradient of f:
  // the grid-restricted object the pair-form cancellations need. A spectral
  // centered-difference multiplier on the padded torus would be cheaper by
  // d forward transforms but convolves a gradient with ghost values one
  // layer outside the box, which breaks those identities at the boundary.
  CoefficientSet coefficients(const ScalarField& f, bool with_c = true, bool with_beta = false);

 private:
  const KernelSpectrum& spectrum_locked(KernelComponent c);
  VectorField conv_rows_locked(const VectorField& w);

  GridSpec grid_;
  double gamma_ = 0.0;
  double rho_ = 0.0;
  std::mutex mu_;
  PaddedConv conv_;
  std::array<std::unique_ptr<KernelSpectrum>, 12> spectra_;
};

// Process-wide cache: one KernelSet per (grid shape, gamma).
KernelSet& kernel_cache(const GridSpec& g, double gamma);
void clear_kernel_cache();

// Smallest/largest eigenvalue of a symmetric matrix in the MatrixField
// component layout (closed form, d <= 3).
double lambda_min_sym(const std::array<double, 6>& m, int d);
double lambda_max_sym(const std::array<double, 6>& m, int d);

/**
 * Coercivity floor: min over cells of lambda_min(A(v)) / <v>^gamma.
 *
 * Returns 0 if some cell's A has an eigenvalue below the PSD tolerance
 * -1e-12 * max|A|, and clamps tiny negative eigenvalues to zero otherwise,
 * so A xi.xi >= estimate_K0 * <v>^gamma |xi|^2 holds on every cell by
 * construction.
 */
double estimate_K0(const CoefficientSet& coeffs, double gamma);

// Largest diffusion eigenvalue over the grid; the CFL bound uses it.
double max_lambda_A(const CoefficientSet& coeffs);

// Both extremes in one sweep (the per-step solver path needs k0 and the CFL
// eigenvalue for the same coefficient set).
struct SpectralStats {
  double k0 = 0.0;
  double lambda_max = 0.0;
};
SpectralStats spectral_stats(const CoefficientSet& coeffs, double gamma);

}  // namespace landau
