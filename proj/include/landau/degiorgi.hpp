#pragma once

#include <vector>

#include "landau/functionals.hpp"
#include "landau/grid.hpp"

namespace landau {

// Dyadic level/time ladders: levels[n] = K (1 - 2^{-n}) rising to K,
// times[n] = t_star (1 - 2^{-n-1}) rising to t_star. Sizes n_max + 1.
struct Ladders {
  std::vector<double> levels;
  std::vector<double> times;
};
Ladders ladders(double K, double t_star, int n_max);

// mu(s, p) = (2s - gamma d (p-1)) / (2p), the weight order the L^p-generation
// hypothesis asks of the initial datum.
double mu_exponent(double s, double p, double gamma, int d);

/**
 * Geometric decay ratio Q for the level-set iteration, as the max of three
 * powers of two. p_or_alpha is p_gamma on the -2 < gamma < 0 branch
 * (admissible in (d/(d+gamma), min(3, d/(d-2)))), alpha on the gamma = -2
 * branch (admissible in (1/2, 1)); moment order s must exceed (d/2)|gamma|
 * resp. d.
 */
double compute_Q(int d, double gamma, double s, double p_or_alpha);

/**
 * Level threshold K(t_star, T) = max(K1, K2, K3) from the three-way 1/3 split
 * of the iteration inequality, each K_i = (3 C y^... t_star^... E0^...)^{1/theta_i}
 * with the branch's exponents. On the gamma = -2 branch the K3 moment is
 * m_{1/(1-alpha)}, assumed tied to s via 1/(1-alpha) = s. E0 = 0 gives all
 * K_i = 0 (every factor carries a positive power of E0).
 */
struct KFormula {
  double K = 0.0;
  double K1 = 0.0;
  double K2 = 0.0;
  double K3 = 0.0;
  double K_sum = 0.0;  // rough bound K1 + K2 + K3
};
KFormula compute_K(int d, double gamma, double s, double p_or_alpha, double t_star, double E0,
                   double y_s, double C);

struct DeGiorgiConfig {
  double gamma = -1.0;
  double s = 3.0;
  double p_gamma = 2.0;  // -2 < gamma < 0 branch
  double alpha = 0.0;    // gamma = -2 branch; <= 0 derives the tie alpha = 1 - 1/s
  double t_star = 0.5;
  double T = 1.0;
  int n_max = 8;
  double c0 = 0.0;          // energy-functional coercivity constant (K0/4), > 0
  double K = 0.0;           // ladder cap; <= 0 selects the formula K (else bisected K)
  double C_empirical = 1.0; // constant fed to compute_K
};

struct DeGiorgiTrace {
  std::vector<double> levels;
  std::vector<double> times;
  std::vector<double> E;       // E_n measured with K_used's ladder
  std::vector<double> target;  // E0 Q^{-n}
  double Q = 0.0;
  double E0 = 0.0;
  double y_s = 0.0;
  double K_used = 0.0;
  double K_bisect = 0.0;  // smallest cap with E_{n_max} < 1e-12 E0
  KFormula K_formula;
  double sup_f = 0.0;  // grid max over [t_star, T]
  bool decay_pass = false;
  int decay_violations = 0;
  int flagged_n = -1;  // n_max-only violation, tolerated but flagged
};

/**
 * Runs the level-set iteration on a snapshot series: builds ladders for
 * K_used (config K if positive, else the formula K with C_empirical, else the
 * bisected K), measures E_n = energy over the window [t_n, T] at level l_n,
 * compares against E0 Q^{-n}, bisects the minimal cap killing E_{n_max}, and
 * measures sup f over [t_star, T].
 */
DeGiorgiTrace iterate(const SnapshotSeries& series, const DeGiorgiConfig& cfg);

// Minimal constant C such that K = compute_K(C).K makes the measured ladder
// satisfy E_n <= E0 Q^{-n} for all n (the n_max-only exception tolerated).
// Log-bisection over [1e-6, 1e6]; throws if even the upper end fails.
double back_solve_C(const SnapshotSeries& series, const DeGiorgiConfig& cfg);

}  // namespace landau
