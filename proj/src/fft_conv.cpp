#include "landau/fft_conv.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace landau {

namespace {
// FFTW plan creation/destruction is not thread-safe.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

PaddedConv::PaddedConv(const GridSpec& g) : g_(g) {
  pn_ = 2 * g.n;
  pcells_ = 1;
  for (int a = 0; a < g.d; ++a) pcells_ *= pn_;
  ccells_ = pcells_ / pn_ * (pn_ / 2 + 1);

  real_ = fftw_alloc_real(static_cast<std::size_t>(pcells_));
  field_spec_ = reinterpret_cast<std::complex<double>*>(
      fftw_alloc_complex(static_cast<std::size_t>(ccells_)));
  work_ = reinterpret_cast<std::complex<double>*>(
      fftw_alloc_complex(static_cast<std::size_t>(ccells_)));
  if (!real_ || !field_spec_ || !work_) throw std::bad_alloc();

  std::lock_guard<std::mutex> lock(plan_mutex());
  if (g.d == 3) {
    fwd_ = fftw_plan_dft_r2c_3d(pn_, pn_, pn_, real_,
                                reinterpret_cast<fftw_complex*>(work_), FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_3d(pn_, pn_, pn_, reinterpret_cast<fftw_complex*>(work_),
                                real_, FFTW_ESTIMATE);
  } else {
    fwd_ = fftw_plan_dft_r2c_2d(pn_, pn_, real_,
                                reinterpret_cast<fftw_complex*>(work_), FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_2d(pn_, pn_, reinterpret_cast<fftw_complex*>(work_),
                                real_, FFTW_ESTIMATE);
  }
  if (!fwd_ || !bwd_) throw std::runtime_error("PaddedConv: FFTW plan creation failed");
}

PaddedConv::~PaddedConv() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  if (fwd_) fftw_destroy_plan(fwd_);
  if (bwd_) fftw_destroy_plan(bwd_);
  fftw_free(real_);
  fftw_free(field_spec_);
  fftw_free(work_);
}

KernelSpectrum PaddedConv::kernel_spectrum(
    const std::function<double(const std::array<double, 3>&)>& table) {
  // Wrap order: padded index m maps to offset m*h for m < n, (m-2n)*h after.
  const int n = g_.n;
  const double h = g_.h;
  auto offset = [&](int m) { return (m < n ? m : m - pn_) * h; };

  if (g_.d == 3) {
    for (int mx = 0; mx < pn_; ++mx) {
      const double zx = offset(mx);
      for (int my = 0; my < pn_; ++my) {
        const double zy = offset(my);
        std::int64_t base = (static_cast<std::int64_t>(mx) * pn_ + my) * pn_;
        for (int mz = 0; mz < pn_; ++mz)
          real_[base + mz] = table({zx, zy, offset(mz)});
      }
    }
  } else {
    for (int mx = 0; mx < pn_; ++mx) {
      const double zx = offset(mx);
      std::int64_t base = static_cast<std::int64_t>(mx) * pn_;
      for (int my = 0; my < pn_; ++my) real_[base + my] = table({zx, offset(my), 0.0});
    }
  }
  fftw_execute_dft_r2c(fwd_, real_, reinterpret_cast<fftw_complex*>(work_));
  KernelSpectrum ks;
  ks.c.assign(work_, work_ + ccells_);
  return ks;
}

void PaddedConv::load(const ScalarField& f) {
  if (!f.grid.same_shape(g_)) throw std::invalid_argument("PaddedConv::load: grid mismatch");
  const int n = g_.n;
  for (std::int64_t i = 0; i < pcells_; ++i) real_[i] = 0.0;
  if (g_.d == 3) {
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        const double* src = f.v.data() + (static_cast<std::int64_t>(ix) * n + iy) * n;
        double* dst = real_ + (static_cast<std::int64_t>(ix) * pn_ + iy) * pn_;
        for (int iz = 0; iz < n; ++iz) dst[iz] = src[iz];
      }
  } else {
    for (int ix = 0; ix < n; ++ix) {
      const double* src = f.v.data() + static_cast<std::int64_t>(ix) * n;
      double* dst = real_ + static_cast<std::int64_t>(ix) * pn_;
      for (int iy = 0; iy < n; ++iy) dst[iy] = src[iy];
    }
  }
  fftw_execute_dft_r2c(fwd_, real_, reinterpret_cast<fftw_complex*>(field_spec_));
}

namespace {
// h^d / (2n)^d: quadrature weight and FFTW's unnormalized inverse.
double crop_scale(const GridSpec& g, std::int64_t pcells) {
  double scale = 1.0;
  for (int a = 0; a < g.d; ++a) scale *= g.h;
  return scale / static_cast<double>(pcells);
}
}  // namespace

ScalarField PaddedConv::apply(const KernelSpectrum& ks) {
  if (static_cast<std::int64_t>(ks.c.size()) != ccells_)
    throw std::invalid_argument("PaddedConv::apply: spectrum size mismatch");
  const double scale = crop_scale(g_, pcells_);

#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < ccells_; ++i) work_[i] = field_spec_[i] * ks.c[i];
  fftw_execute_dft_c2r(bwd_, reinterpret_cast<fftw_complex*>(work_), real_);

  ScalarField out = make_scalar(g_);
  const int n = g_.n;
  if (g_.d == 3) {
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        const double* src = real_ + (static_cast<std::int64_t>(ix) * pn_ + iy) * pn_;
        double* dst = out.v.data() + (static_cast<std::int64_t>(ix) * n + iy) * n;
        for (int iz = 0; iz < n; ++iz) dst[iz] = src[iz] * scale;
      }
  } else {
    for (int ix = 0; ix < n; ++ix) {
      const double* src = real_ + static_cast<std::int64_t>(ix) * pn_;
      double* dst = out.v.data() + static_cast<std::int64_t>(ix) * n;
      for (int iy = 0; iy < n; ++iy) dst[iy] = src[iy] * scale;
    }
  }
  return out;
}

KernelSpectrum PaddedConv::field_spectrum(const ScalarField& w) {
  if (!w.grid.same_shape(g_))
    throw std::invalid_argument("PaddedConv::field_spectrum: grid mismatch");
  const int n = g_.n;
  for (std::int64_t i = 0; i < pcells_; ++i) real_[i] = 0.0;
  if (g_.d == 3) {
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        const double* src = w.v.data() + (static_cast<std::int64_t>(ix) * n + iy) * n;
        double* dst = real_ + (static_cast<std::int64_t>(ix) * pn_ + iy) * pn_;
        for (int iz = 0; iz < n; ++iz) dst[iz] = src[iz];
      }
  } else {
    for (int ix = 0; ix < n; ++ix) {
      const double* src = w.v.data() + static_cast<std::int64_t>(ix) * n;
      double* dst = real_ + static_cast<std::int64_t>(ix) * pn_;
      for (int iy = 0; iy < n; ++iy) dst[iy] = src[iy];
    }
  }
  fftw_execute_dft_r2c(fwd_, real_, reinterpret_cast<fftw_complex*>(work_));
  KernelSpectrum ks;
  ks.c.assign(work_, work_ + ccells_);
  return ks;
}

ScalarField PaddedConv::apply_pairs(const std::array<const KernelSpectrum*, 3>& ks,
                                    const std::array<const KernelSpectrum*, 3>& ws) {
  for (int a = 0; a < g_.d; ++a)
    if (!ks[a] || !ws[a] || static_cast<std::int64_t>(ks[a]->c.size()) != ccells_ ||
        static_cast<std::int64_t>(ws[a]->c.size()) != ccells_)
      throw std::invalid_argument("PaddedConv::apply_pairs: bad spectrum for axis " +
                                  std::to_string(a));
  const double scale = crop_scale(g_, pcells_);

  if (g_.d == 3) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < ccells_; ++i)
      work_[i] = ks[0]->c[static_cast<std::size_t>(i)] * ws[0]->c[static_cast<std::size_t>(i)] +
                 ks[1]->c[static_cast<std::size_t>(i)] * ws[1]->c[static_cast<std::size_t>(i)] +
                 ks[2]->c[static_cast<std::size_t>(i)] * ws[2]->c[static_cast<std::size_t>(i)];
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < ccells_; ++i)
      work_[i] = ks[0]->c[static_cast<std::size_t>(i)] * ws[0]->c[static_cast<std::size_t>(i)] +
                 ks[1]->c[static_cast<std::size_t>(i)] * ws[1]->c[static_cast<std::size_t>(i)];
  }
  fftw_execute_dft_c2r(bwd_, reinterpret_cast<fftw_complex*>(work_), real_);

  ScalarField out = make_scalar(g_);
  const int n = g_.n;
  if (g_.d == 3) {
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        const double* src = real_ + (static_cast<std::int64_t>(ix) * pn_ + iy) * pn_;
        double* dst = out.v.data() + (static_cast<std::int64_t>(ix) * n + iy) * n;
        for (int iz = 0; iz < n; ++iz) dst[iz] = src[iz] * scale;
      }
  } else {
    for (int ix = 0; ix < n; ++ix) {
      const double* src = real_ + static_cast<std::int64_t>(ix) * pn_;
      double* dst = out.v.data() + static_cast<std::int64_t>(ix) * n;
      for (int iy = 0; iy < n; ++iy) dst[iy] = src[iy] * scale;
    }
  }
  return out;
}

}  // namespace landau
