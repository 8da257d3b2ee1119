#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "landau/degiorgi.hpp"
#include "landau/inequalities.hpp"
#include "landau/solver.hpp"

namespace landau {

// Initial-datum recipe; decode with build_initial. Unused parameters stay at
// their defaults for kinds that do not read them.
struct InitialSpec {
  std::string kind = "maxwellian";  // maxwellian | gaussian | bimodal | spike_with_bath |
                                    // shell | compact_bump | shell_ladder
  std::array<double, 3> center{0.0, 0.0, 0.0};
  double sigma = 1.0;
  double amp = 1.0;
  double separation = 2.0;
  double radius = 2.0;
  double width = 0.5;
  double spike_mass = 0.5;
  std::vector<double> radii, widths, heights;  // shell_ladder bands
  bool normalize = true;  // rescale to unit mass, zero momentum, energy d
};

ScalarField build_initial(const GridSpec& g, const InitialSpec& spec);

struct ConservationTolerances {
  double mass = 1e-13;            // absolute drift
  double momentum = 1e-4;         // absolute (momentum is 0 after normalization)
  double energy = 1e-4;           // relative drift
  double entropy_slack = 1e-6;    // tolerated increase per unit time
};

struct RatesBlock {
  double s = 0.0;
  double p = 2.0;
  double slope_tol = 0.2;      // relative window around the target exponent
  double plateau_bound = 0.0;  // 0 = 5x the Maxwellian L^2 mass for (0,2)
  double t_plateau = 1.0;      // long-time branch starts here
};

struct MomentsBlock {
  double s = 4.0;
  double envelope = 0.05;  // fraction of max m_s allowed above the linear fit
};

struct PoincareBlock {
  std::vector<double> gammas = {-0.5, -1.0};
  double eps_max = 1.0;
  int eps_decades = 4;
  int eps_per_decade = 6;
  std::uint64_t family_seed = 20260815;
  int random_members = 64;
  double slope_tol = 0.25;         // relative, finite-target gammas
  double critical_drift_min = 0.3; // min slope drift across decade windows, gamma = -2
};

struct DeGiorgiBlock {
  DeGiorgiConfig cfg;            // c0 <= 0 means "use measured min K0 / 4"
  std::string mode = "property"; // property | ledger
  double factor_tol = 4.0;       // K_bisect vs sup f comparison band
};

struct LorentzBlock {
  int field_count = 200;
  std::uint64_t seed = 7;
};

struct ExperimentConfig {
  std::string scenario;  // run | conservation | rates | moments | poincare | degiorgi |
                         // lorentz-selftest
  int d = 3;
  int n = 32;
  double half_width = 8.0;
  double gamma = -1.0;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  InitialSpec initial;
  SolverConfig solver;
  ConservationTolerances tolerances;
  int checkpoint_every = 0;      // snapshots per checkpoint directory; 0 = none
  std::string restart_from;      // checkpoint directory to resume from
  RatesBlock rates;
  MomentsBlock moments;
  PoincareBlock poincare;
  DeGiorgiBlock degiorgi;
  LorentzBlock lorentz;
  std::string config_echo;  // canonical JSON of the parsed config, embedded in reports
};

// Strict parse: unknown keys anywhere are errors with field paths; module
// constraints (grid shape, gamma range, exponent admissibility) re-checked.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// A list config {"configs": [...]} expands to several runs (worker pool,
// sized by LANDAU_THREADS); a plain config yields one.
std::vector<ExperimentConfig> load_config_list(const std::string& path);

struct RateFit {
  double t_lo = 0.0, t_hi = 0.0;  // fitted window
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max deviation from the fit over the window
  double target = 0.0;    // analytic exponent (appearance fits only)
  bool fitted = false;
  bool pass = false;
  std::string note;  // reason when declined
};

/**
 * Least-squares slope of log M_{s,p} vs log t over the early decay window
 * (points below half the initial value, above 4x the global minimum, forming
 * a monotone stretch of >= 6 rows). Declines the fit (fitted = false) when no
 * such window exists, e.g. on stationary data. pass = slope within
 * rel_tol of -d(p-1)/2. The (s, p) column must be among cfg.functionals.
 */
RateFit fit_appearance_rate(const Trajectory& traj, const SolverConfig& cfg, double s, double p,
                            double rel_tol = 0.2);

// Linear fit of m_s(t) over the whole trajectory; pass = every sample at most
// envelope * max m_s above the fitted line. Requires the m_s column.
RateFit fit_moment_growth(const Trajectory& traj, const SolverConfig& cfg, double s,
                          double envelope = 0.05);

// Writes header + rows with 17-significant-digit floats. Column order:
// time,dt,mass,mom_x[,mom_y[,mom_z]],energy,entropy,k0, then one column per
// configured functional.
void write_diagnostics_csv(const std::string& path, const Trajectory& traj,
                           const SolverConfig& cfg, const std::string& prefix_rows = "");

// Lorentz-space self-checks shared by the CLI scenario and the acceptance
// suite: equimeasurability, quasi-norm identities, Hoelder/interpolation
// ratios over seeded random fields, Sobolev width stability.
struct LorentzSelfTest {
  double equimeasurability_gap = 0.0;  // sup |d_f - d_{f*}|, exact objects
  double pp_vs_lp_gap = 0.0;           // ||f||_{p,p} vs L^p, relative
  double norm_identity_gap = 0.0;      // rearrangement vs distribution form
  double indicator_gap = 0.0;          // vs (p/q)^{1/q} m^{1/p}
  double max_holder_ratio = 0.0;
  double max_interpolation_ratio = 0.0;
  double sobolev_spread = 0.0;  // relative width dependence of the Sobolev ratio
  int fields_checked = 0;
  bool pass = false;
};
LorentzSelfTest lorentz_selftest(int field_count, std::uint64_t seed);

// Executes one scenario: artifacts under cfg.out_dir, returns the process
// exit code (0 = checks pass, 2 = checks failed). Throws on execution errors.
int run_scenario(const ExperimentConfig& cfg);

// List mode: pool of LANDAU_THREADS workers (default 1), one scenario each.
// Returns the max exit code.
int run_scenarios(const std::vector<ExperimentConfig>& cfgs);

// LANDAU_THREADS (>= 1) or 1 when unset/invalid; also caps OpenMP.
int configured_threads();

}  // namespace landau
