#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "landau/coefficients.hpp"
#include "landau/grid.hpp"

namespace landau {

// Least-squares line y ~ intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Weighted-Poincare machinery
// ---------------------------------------------------------------------------

struct PoincareSides {
  double lhs = 0.0;     // -int phi^2 c_lambda[f]
  double d_term = 0.0;  // int |grad(<v>^{gamma/2} phi)|^2
  double l2_term = 0.0; // int phi^2 <v>^gamma
};

// Sides from a precomputed potential field c_lambda[f] (family sweeps reuse it).
PoincareSides poincare_sides(const ScalarField& c_lambda_field, const ScalarField& phi,
                             double gamma);

// Convenience: builds c_lambda[f] itself. lambda must be gamma or gamma + 1
// (tolerance 1e-12) and satisfy lambda + d > 0.
PoincareSides poincare_sides(KernelSet& ks, const ScalarField& f, const ScalarField& phi,
                             double lambda);

// Documented deterministic test-function family: Gaussians on a center
// lattice {-extent, 0, +extent}^d at the given widths, Hermite-modulated
// Gaussians of total degree <= 2, and seeded band-limited random fields.
struct PoincareFamilyConfig {
  double center_extent = 1.5;
  std::vector<double> widths = {0.35, 0.7, 1.4};
  int hermite_max_degree = 2;
  int random_members = 64;
  double random_kmax = 3.0;
  double random_envelope = 1.8;
  std::uint64_t seed = 20260815;
};

std::vector<ScalarField> poincare_family(const GridSpec& g, const PoincareFamilyConfig& cfg);

struct PoincareReport {
  double gamma = 0.0;
  std::vector<double> eps;
  std::vector<double> C;        // per eps: max over family of (lhs - eps*d)/l2
  std::vector<int> argmax_id;   // family member attaining the max
  double slope = 0.0;           // log C vs log eps over [window_lo, window_hi]
  double window_lo = 0.0;
  double window_hi = 0.0;
  // Slopes over the three decade windows sliding down from window_hi;
  // a genuine power law keeps them close, the critical case drifts.
  std::vector<double> window_slopes;
  std::string family_descriptor;
  std::uint64_t seed = 0;
  int family_size = 0;
};

/**
 * Measures the smallest constant C(eps) making
 *   -int phi^2 c_gamma[f] <= eps int |grad(<v>^{gamma/2}phi)|^2 + C int phi^2 <v>^gamma
 * hold across the family, then fits log C ~ slope * log eps over a data-driven
 * window: eps_hi is the largest eps with C(eps) > 2 C(eps_max) and the fit
 * runs over [eps_hi/10, eps_hi].
 */
PoincareReport estimate_C_of_eps(KernelSet& ks, const ScalarField& f,
                                 const std::vector<double>& eps_list,
                                 const PoincareFamilyConfig& family);

// ---------------------------------------------------------------------------
// Direct double-sum checks (coarse grids; singular cells regularized exactly
// as in KernelSet)
// ---------------------------------------------------------------------------

// I[phi] <= 2^{-gamma}(d-1)(gamma+d)(I1 + I2), all three sides measured.
struct SplitReport {
  double I_phi = 0.0;
  double I1 = 0.0;
  double I2 = 0.0;
  double rhs = 0.0;  // 2^{-gamma}(d-1)(gamma+d)(I1+I2)
};
SplitReport splitting_check(const ScalarField& f, const ScalarField& phi, double gamma);

/**
 * gamma = -2 splitting of J = int |v-v*|^{-2} psi^2(v) F(v*),
 * psi = <v>^{-1} phi, F = <v>^2 f, cut at |v-v*| = 1 and level R1 on F.
 * lattice_kernel_mass is h^d sum_{|z|<=1} |z|^{-2} (regularized origin), the
 * discrete stand-in for |S^{d-1}|/(d-2).
 */
struct CriticalSplit {
  double J1 = 0.0;
  double J2_minus = 0.0;
  double J2_plus = 0.0;
  double J1_bound = 0.0;        // ||f||_{L^1_2} ||psi||_{L^2}^2
  double J2_minus_bound = 0.0;  // C_d R1 ||psi||_{L^2}^2
  double C_d = 0.0;             // |S^{d-1}|/(d-2)
  double lattice_kernel_mass = 0.0;
};
CriticalSplit critical_split(const ScalarField& f, const ScalarField& phi, double R1);

/**
 * Tail-mass bound for F = <v>^2 f at level R1 (gamma = -2 route), with the
 * superquadratic moment family Psi(r) = r^{s/2}:
 *   ||F 1_{F>R1}||_1 <= 2 (1+R2)/log(R1) H_+(f) + m_2/R2
 *                       + m_psi R2^{(2-s)/2} + 2 m_psi (sqrt(R1)-1)^{(2-s)/2}
 * where H_+ is the positive entropy part int (f log f)_+ (the signed entropy
 * would make the right side negative on near-Maxwellian data, so the positive
 * part — which is what the level-set derivation actually controls — is used).
 * Every step of the chain is a cellwise inequality, so lhs <= rhs holds
 * exactly in quadrature whenever R1 >= 4.
 */
struct TailBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double term_entropy = 0.0;
  double term_energy = 0.0;
  double term_psi_R2 = 0.0;
  double term_psi_R1 = 0.0;
  double h_plus = 0.0;
  double m2 = 0.0;
  double m_psi = 0.0;
};
TailBound tail_bound_check(const ScalarField& f, double R1, double R2, double s);

// Explicit thresholds making C_tilde * rhs <= eps by construction:
//   R2 = max(4 C m2/eps, (4 C m_psi/eps)^{2/(s-2)})
//   R1 = max(4, exp(8 C (1+R2) H_+/eps), ((8 C m_psi/eps)^{2/(s-2)} + 1)^2)
struct TailThresholds {
  double R1 = 0.0;
  double R2 = 0.0;
};
TailThresholds tail_thresholds(const ScalarField& f, double s, double eps, double C_tilde);

/**
 * d = 3 singular-region bound via Hardy-Littlewood-Sobolev:
 *   J_R = int_{|v-v*|<=1} (f 1_{f>R})(v*)|v-v*|^{-2} phi^2(v) <= C ||f 1_{f>R}||_{9/4} ||phi||_{9/4}^2.
 * chained_bound evaluates the moment/entropy chain (constant 1):
 *   log(R)^{-th/3} (int <v>^s f)^{(1-th)/3} (int |f log f|)^{th/3}
 *   * ||<.>^2 phi||_1^{2/3} ||<.>^{-1} f||_6^{2/3} ||<.>^{-1} phi||_6^{4/3},
 * th = 1 - 2/s.
 */
struct HlsReport {
  double J_R = 0.0;
  double bound_product = 0.0;  // ||f 1_{f>R}||_{9/4} ||phi||_{9/4}^2
  double implied_C = 0.0;      // J_R / bound_product
  double chained_bound = 0.0;
};
HlsReport hls_singular_check(const ScalarField& f, const ScalarField& phi, double R, double s);

// ---------------------------------------------------------------------------
// Level-change interpolation inequalities (constants stripped)
// ---------------------------------------------------------------------------

enum class LevelInequality { L2, Lp, Lq, Ld };

/**
 * lhs and constant-free rhs of one level-change inequality between levels
 * k < ell; implied_constant = lhs/rhs0. `param` is p for Lp (p in [1, d/(d-2))),
 * q for Lq (q in ((2d+2)/d, (2d+4)/d), weight s = -gamma d/(2d+4-qd)), s for
 * Ld (s > 2, gradient weight <.>^{-1}); ignored for L2.
 */
struct LevelCheck {
  double lhs = 0.0;
  double rhs0 = 0.0;
  double implied_constant = 0.0;
};
LevelCheck level_inequality_check(const ScalarField& f, double k, double ell,
                                  LevelInequality which, double gamma, double param = 0.0);

}  // namespace landau
