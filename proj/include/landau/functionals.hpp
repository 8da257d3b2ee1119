#pragma once

#include <vector>

#include "landau/grid.hpp"

namespace landau {

// <v>^{s/2} f^{p/2}; cells with f < 0 are clamped to 0 before the power.
ScalarField weighted_power(const ScalarField& f, double s, double p);

// M_{s,p} = integral of f^p <v>^s. Requires p > 1.
double M_sp(const ScalarField& f, double s, double p);

// D_{s,p} = integral of |grad(<v>^{s/2} f^{p/2})|^2. Requires p > 1.
double D_sp(const ScalarField& f, double s, double p);

// m_s = integral of f <v>^s (bracket weight <v> = sqrt(1 + |v|^2)).
double bracket_moment(const ScalarField& f, double s);

// Boltzmann entropy: integral of f log f over cells with f > 0.
double entropy(const ScalarField& f);

// Integral of (f log f)_+, i.e. only cells with f > 1 contribute.
double entropy_positive_part(const ScalarField& f);

// Psi-moment for the power family Psi(r) = r^{s/2}: integral of f |v|^s.
// Requires s > 2 (superquadratic family).
double psi_moment(const ScalarField& f, double s);

// Level truncation f_ell^+ = (f - ell) 1_{f >= ell}. Requires ell >= 0.
ScalarField level_truncate(const ScalarField& f, double ell);

// Non-owning time-ordered snapshot view of a trajectory.
struct SnapshotSeries {
  std::vector<double> times;
  std::vector<const ScalarField*> fields;
};

/**
 * Level-set energy functional
 *
 *   E_ell(T1, T2) = max over snapshot times t in [T1, T2] of
 *     0.5 ||f_ell^+(t)||_{L2}^2 + c0 * int_{t_first}^{t} ||grad(<.>^{gamma/2} f_ell^+)||^2
 *
 * with the time integral by trapezoid over stored snapshots starting at the
 * first stored time >= T1. Requires a nonempty window; when T2 > T1 the
 * stored times must cover it densely (gaps <= (T2-T1)/16). T1 == T2
 * degenerates to 0.5 ||f_ell^+(T1)||^2.
 */
double energy_functional(const SnapshotSeries& series, double ell, double T1, double T2,
                         double c0, double gamma);

// sup over snapshots with time in [T1, T2] of max_v f (0 on empty fields).
double sup_norm_over_window(const SnapshotSeries& series, double T1, double T2);

}  // namespace landau
