#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "landau/grid.hpp"

// Forward decls so fftw3.h stays out of public headers.
struct fftw_plan_s;

namespace landau {

// Spectrum of a lattice kernel on the zero-padded (2n)^d grid, r2c layout.
struct KernelSpectrum {
  std::vector<std::complex<double>> c;
};

/**
 * Linear convolution on the velocity grid through zero-padded FFTs.
 *
 * The padded grid has 2n points per axis, so lattice offsets k - j with
 * k, j in [0,n) never wrap: the circular convolution equals the linear one
 * exactly. apply() returns h^d * sum_j table(v_k - v_j) f_j on the original
 * grid. Plans use FFTW_ESTIMATE: plan choice (and therefore rounding) is
 * reproducible run to run, which the determinism contract requires.
 *
 * Not safe for concurrent use; callers serialize access.
 */
class PaddedConv {
 public:
  explicit PaddedConv(const GridSpec& g);
  ~PaddedConv();
  PaddedConv(const PaddedConv&) = delete;
  PaddedConv& operator=(const PaddedConv&) = delete;

  const GridSpec& grid() const { return g_; }

  // Spectrum of the kernel table(z) sampled at lattice offsets (wrap order).
  KernelSpectrum kernel_spectrum(const std::function<double(const std::array<double, 3>&)>& table);

  // Forward FFT of the zero-padded field; kept until the next load().
  void load(const ScalarField& f);

  // Inverse transform of (loaded spectrum * ks), cropped and scaled by h^d.
  ScalarField apply(const KernelSpectrum& ks);

  // Forward FFT of the zero-padded field, returned as a standalone spectrum
  // (same layout as kernel spectra). Does not disturb the loaded field.
  KernelSpectrum field_spectrum(const ScalarField& w);

  // Inverse transform of sum_l ks[l] * ws[l] (d terms), cropped and scaled
  // by h^d: the convolution sum_l (kernel_l * field_l) in one pass.
  ScalarField apply_pairs(const std::array<const KernelSpectrum*, 3>& ks,
                          const std::array<const KernelSpectrum*, 3>& ws);

 private:
  GridSpec g_;
  int pn_ = 0;                // 2n
  std::int64_t pcells_ = 0;   // (2n)^d
  std::int64_t ccells_ = 0;   // r2c complex count
  double* real_ = nullptr;
  std::complex<double>* field_spec_ = nullptr;
  std::complex<double>* work_ = nullptr;
  fftw_plan_s* fwd_ = nullptr;
  fftw_plan_s* bwd_ = nullptr;
};

}  // namespace landau
