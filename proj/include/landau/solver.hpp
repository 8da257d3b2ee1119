#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "landau/coefficients.hpp"
#include "landau/functionals.hpp"
#include "landau/grid.hpp"

namespace landau {

// A per-row diagnostic column beyond the standard set. Moment is the
// bracket-weighted m_s = int f <v>^s; LpMoment/Dissipation are M_{s,p}/D_{s,p}.
struct FunctionalRequest {
  enum class Kind { Moment, LpMoment, Dissipation };
  Kind kind = Kind::Moment;
  double s = 0.0;
  double p = 2.0;
  std::string column_name() const;  // m{s} / M{s}_{p} / D{s}_{p}
};

enum class TimeScheme { Euler, RK2 };

// Two discrete realizations of the same continuum flux A grad f - b[f] f:
//   Gradient:     F_i = A_i (grad_h f)_i - f_i (a * grad_h f)_i
//   LogGradient:  F_i = max(f_i, 0) [ A_i g_i - (a * max(f,0) g)_i ],
//                 g = clamped gradient of log max(f, tiny)
// Both conserve mass exactly and momentum/energy to roundoff (pair
// antisymmetry with z.a(z) = 0). LogGradient additionally makes the discrete
// entropy production a negative quadratic form (exact H-theorem), leaves the
// Maxwellian stationary to tail accuracy, and its flux vanishes with f, so
// dispersive noise cannot radiate into the far field.
enum class FluxForm { Gradient, LogGradient };

struct SolverConfig {
  double gamma = -1.0;
  double cfl = 0.4;                 // fraction of the parabolic stability limit
  double t_end = 1.0;
  double snapshot_interval = 0.1;  // cadence for stored states
  TimeScheme scheme = TimeScheme::RK2;
  FluxForm flux = FluxForm::LogGradient;
  bool positivity_floor = false;    // clip negative cells after each step, rescale mass
  std::vector<FunctionalRequest> functionals;
};

struct DiagnosticsRow {
  double time = 0.0;
  double dt = 0.0;  // step taken FROM this state (0 on the final row)
  double mass = 0.0;
  std::array<double, 3> momentum{0.0, 0.0, 0.0};
  double energy = 0.0;
  double entropy_val = 0.0;
  double k0 = 0.0;
  double min_f = 0.0;  // smallest cell value, tracks undershoots when the floor is off
  std::vector<double> extra;  // aligned with SolverConfig::functionals
};

struct Trajectory {
  GridSpec grid{};
  std::vector<double> snap_times;
  std::vector<ScalarField> snapshots;
  std::vector<DiagnosticsRow> rows;
  std::uint64_t steps = 0;
  std::uint64_t clipped_cells = 0;  // total cells touched by the positivity floor
  bool aborted = false;
  std::string abort_reason;

  SnapshotSeries series() const;
};

// (mass - 1, max |momentum component|, energy - d)
std::array<double, 3> normalization_residual(const ScalarField& f);

/**
 * Rescales f to unit mass, zero momentum, energy d via g = c f(alpha v + u),
 * resampling with cubic Lagrange interpolation (zero extension, negative
 * interpolants clamped). Fields already normalized to 1e-12 are returned
 * unchanged, so analytically prepared data keep their exact cell values.
 * Throws on nonpositive mass or non-convergence (residual > 1e-10).
 */
ScalarField normalize_initial(const ScalarField& f);

// Cubic Lagrange point sample with zero extension outside the domain.
double sample_cubic(const ScalarField& f, const std::array<double, 3>& x);

/**
 * Divergence-form collision operator L f = div(A[f] grad f - beta[f] f) with
 * beta[f] = a * grad f, the drift coefficient in integrated-by-parts form
 * (analytically b * f, since b = div a). Node fluxes
 *   F_i = A_i (grad_h f)_i - f_i beta_i
 * use the centered zero-extension gradient; the divergence averages node
 * fluxes onto faces (algebraically the centered divergence in the interior)
 * and boundary faces carry zero flux. Structure: the cell sum of L f
 * telescopes to zero exactly (mass), and writing the flux as the pair sum
 *   F_i = h^d sum_j a(v_i - v_j) [f_j (grad f)_i - f_i (grad f)_j]
 * makes the momentum and energy sums vanish by the i <-> j antisymmetry and
 * z . a(z) = 0, so both are conserved to FFT roundoff plus tail dust at the
 * truncation boundary. Requires coeffs.has_beta.
 */
ScalarField apply_operator(const ScalarField& f, const CoefficientSet& coeffs);

/**
 * Collision operator in the requested flux form. coeffs must carry A (and
 * beta for FluxForm::Gradient); the LogGradient form runs its own row
 * convolution a * (max(f,0) g) through ks. For the LogGradient identities
 * (conservation to roundoff, negative entropy production) to hold exactly,
 * f must be nonnegative and coeffs built from that same field; the step
 * drivers feed the clipped state through both, so raw states with dust-size
 * undershoots never weaken the identities. If drift_max is non-null it
 * receives the largest drift-velocity component max_i |(a * w)_i|_inf, the
 * advective half of the CFL bound.
 */
ScalarField apply_collision(const ScalarField& f, KernelSet& ks, const CoefficientSet& coeffs,
                            FluxForm form, double* drift_max = nullptr);

// One Heun (explicit trapezoid) step; coefficients recomputed at the
// predictor state. Exposed for step-level tests.
ScalarField heun_step(const ScalarField& f, KernelSet& ks, double dt,
                      FluxForm form = FluxForm::LogGradient);

// One forward Euler step.
ScalarField euler_step(const ScalarField& f, KernelSet& ks, double dt,
                       FluxForm form = FluxForm::LogGradient);

// Explicit step bound cfl * min(h^2 / (2 d lambda_max(A)), h / (2 d drift_max)):
// parabolic limit of the diffusion part and advective limit of the drift part.
double cfl_dt(double lambda_max, double drift_max, const GridSpec& g, double cfl);

/**
 * Integrates from f0 at t_start until t_end. Snapshots are recorded at
 * t_start, then after the first step crossing each cadence point (tagged with
 * the true time, never interpolated), and at t_end. Diagnostics are recorded
 * every step. dt never adapts to the snapshot cadence, so the step sequence
 * depends only on the data. Non-finite states abort the run (aborted flag +
 * reason; the last finite state is the final snapshot).
 */
Trajectory run(const ScalarField& f0, KernelSet& ks, const SolverConfig& cfg,
               double t_start = 0.0, std::uint64_t step_start = 0);

}  // namespace landau
