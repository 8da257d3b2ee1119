#pragma once

#include <vector>

#include "landau/grid.hpp"

namespace landau {

/**
 * Right-continuous nonincreasing step function on [0, inf):
 * value y[k] > 0 on [t[k-1], t[k]) with t[-1] = 0, and 0 beyond t.back().
 * Breakpoints are strictly increasing and values strictly decreasing
 * (equal plateaus merged). Grid-field rearrangements and distribution
 * functions are exact objects of this form, so every Lorentz integral
 * below is a closed-form piecewise power sum.
 */
struct StepFunction {
  std::vector<double> t;
  std::vector<double> y;

  bool empty() const { return t.empty(); }
  double value(double x) const;   // evaluate at x >= 0
  double support() const { return t.empty() ? 0.0 : t.back(); }
};

// d_f(s) = measure{ |f| > s }, exact: breakpoints at the distinct nonzero
// values of |f|, plateau heights are integer cell counts times h^d.
StepFunction distribution(const ScalarField& f);

// Decreasing rearrangement f*: sorted-descending |cell values| with plateau
// widths (count * h^d). Equimeasurable with f by construction.
StepFunction rearrangement(const ScalarField& f);

// Distribution function induced by a rearrangement (exact; used for the
// equimeasurability check d_{f*} = d_f).
StepFunction distribution_of(const StepFunction& rearr);

/**
 * Lorentz quasi-norm via the rearrangement form
 *   ( int_0^inf (t^{1/p} f*(t))^q dt/t )^{1/q},
 * q = inf: sup_t t^{1/p} f*(t). Requires p, q in [1, inf]. A divergent
 * integral (p = inf with q < inf on nonzero f) returns +inf.
 */
double lorentz_norm(const StepFunction& rearr, double p, double q);
double lorentz_norm(const ScalarField& f, double p, double q);

// Same quantity through the distribution-function identity
// ||f||_{p,q}^q = p int_0^inf [s d_f(s)^{1/p}]^q ds/s. Finite p only.
double lorentz_norm_via_distribution(const ScalarField& f, double p, double q);

// I_alpha[g] = |.|^{alpha-d} * g for 0 < alpha < d, by padded FFT; the
// singular cell carries the exact mean of the kernel over the equal-volume
// ball, (d/alpha) rho^{alpha-d}.
ScalarField riesz_potential(const ScalarField& g, double alpha);

// |int f g| / (||f||_{p,q} ||g||_{p',q'}), conjugate p', q'.
double holder_lorentz_ratio(const ScalarField& f, const ScalarField& g, double p, double q);

/**
 * ||f||_{p,q} / ( C ||f||_{p1,q}^theta ||f||_{p2,q}^{1-theta} ),
 * 1 <= p1 < p < p2 < inf, 1/p = theta/p1 + (1-theta)/p2, with the provable
 * constant C = (p / (p1^theta p2^{1-theta}))^{1/q} (indicators are extremal:
 * ratio exactly 1). C = 1 when q = inf.
 */
double interpolation_ratio(const ScalarField& f, double p, double q, double p1, double p2);

// ||f||_{q*,q} / ||grad f||_{L^q}, q* = qd/(d-q), 1 <= q < d.
double sobolev_lorentz_ratio(const ScalarField& f, double q);

}  // namespace landau
