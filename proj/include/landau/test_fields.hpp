#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "landau/grid.hpp"

namespace landau::fields {

// Deterministic RNG: fixed engine + hand-rolled transforms, so streams are
// bit-identical across standard libraries (std::*_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  // uniform in [0, 1)
  double uniform();
  // standard normal via Box-Muller
  double normal();

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// (2 pi)^{-d/2} exp(-|v|^2 / 2): unit mass, zero momentum, energy d.
ScalarField maxwellian(const GridSpec& g);

// amp * exp(-|v - center|^2 / (2 sigma^2))
ScalarField gaussian(const GridSpec& g, const std::array<double, 3>& center, double sigma,
                     double amp = 1.0);

// Per-axis widths.
ScalarField anisotropic_gaussian(const GridSpec& g, const std::array<double, 3>& center,
                                 const std::array<double, 3>& sigma, double amp = 1.0);

// Two equal Gaussians at +-separation/2 along the first axis, unit total mass
// before discretization.
ScalarField bimodal(const GridSpec& g, double separation, double sigma);

// C^2 compactly supported bump: amp * (1 - |v-c|^2/R^2)^3 inside radius R.
ScalarField compact_bump(const GridSpec& g, const std::array<double, 3>& center, double radius,
                         double amp = 1.0);

// Gaussian shell amp * exp(-(|v| - radius)^2 / (2 width^2)).
ScalarField shell(const GridSpec& g, double radius, double width, double amp = 1.0);

// Narrow spike at the origin carrying `spike_mass` plus a broad isotropic
// Gaussian bath carrying the rest, with the bath width chosen so the analytic
// mixture has unit mass, zero momentum and energy = d.
ScalarField spike_with_bath(const GridSpec& g, double spike_mass, double spike_sigma);

// Concentric-shell ladder: value `heights[k]` on the radius band
// [radii[k], radii[k] + widths[k]). Used to engineer prescribed level-set
// geometry. Bands may not overlap; later bands win if they do.
ScalarField shell_ladder(const GridSpec& g, const std::vector<double>& radii,
                         const std::vector<double>& widths, const std::vector<double>& heights);

// Gaussian modulated by a product of per-axis Hermite polynomials He_k
// (k <= 2), giving sign-changing smooth test functions.
ScalarField hermite_gaussian(const GridSpec& g, const std::array<double, 3>& center, double sigma,
                             const std::array<int, 3>& degree);

// Band-limited random field: sum of `modes` random plane waves with
// wavenumbers <= kmax, under a Gaussian envelope of width envelope_sigma.
ScalarField band_limited_random(const GridSpec& g, Rng& rng, int modes, double kmax,
                                double envelope_sigma);

// out += w * g (grids must match)
void add_scaled(ScalarField& out, const ScalarField& g, double w);

}  // namespace landau::fields
