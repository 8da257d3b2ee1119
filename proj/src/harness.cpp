#include "landau/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "landau/io.hpp"
#include "landau/lorentz.hpp"
#include "landau/test_fields.hpp"

namespace landau {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Strict JSON access: every violation names the offending field.
// ---------------------------------------------------------------------------

[[noreturn]] void cfg_error(const std::string& path, const std::string& msg) {
  throw std::invalid_argument("config." + path + ": " + msg);
}

void check_keys(const json& j, const std::string& path, std::set<std::string> allowed) {
  if (!j.is_object()) cfg_error(path, "expected an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) cfg_error(path, "unknown key '" + item.key() + "'");
}

double get_num(const json& j, const std::string& path, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number()) cfg_error(path + "." + key, "expected a number");
  return j[key].get<double>();
}

int get_int(const json& j, const std::string& path, const char* key, int dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number_integer()) cfg_error(path + "." + key, "expected an integer");
  return j[key].get<int>();
}

std::uint64_t get_u64(const json& j, const std::string& path, const char* key,
                      std::uint64_t dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number_unsigned() && !j[key].is_number_integer())
    cfg_error(path + "." + key, "expected a nonnegative integer");
  const auto v = j[key].get<std::int64_t>();
  if (v < 0) cfg_error(path + "." + key, "expected a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

bool get_bool(const json& j, const std::string& path, const char* key, bool dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_boolean()) cfg_error(path + "." + key, "expected a boolean");
  return j[key].get<bool>();
}

std::string get_str(const json& j, const std::string& path, const char* key,
                    const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_string()) cfg_error(path + "." + key, "expected a string");
  return j[key].get<std::string>();
}

std::vector<double> get_num_list(const json& j, const std::string& path, const char* key,
                                 std::vector<double> dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_array()) cfg_error(path + "." + key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : j[key]) {
    if (!e.is_number()) cfg_error(path + "." + key, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::array<double, 3> get_center(const json& j, const std::string& path, const char* key, int d) {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  if (!j.contains(key)) return c;
  auto v = get_num_list(j, path, key, {});
  if (static_cast<int>(v.size()) != d)
    cfg_error(path + "." + key, "expected " + std::to_string(d) + " components");
  for (int a = 0; a < d; ++a) c[static_cast<std::size_t>(a)] = v[static_cast<std::size_t>(a)];
  return c;
}

InitialSpec parse_initial(const json& j, int d) {
  InitialSpec spec;
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    cfg_error("initial", "expected an object with a string 'kind'");
  spec.kind = j["kind"].get<std::string>();
  const std::string path = "initial";
  if (spec.kind == "maxwellian") {
    check_keys(j, path, {"kind", "normalize"});
  } else if (spec.kind == "gaussian") {
    check_keys(j, path, {"kind", "center", "sigma", "amp", "normalize"});
    spec.center = get_center(j, path, "center", d);
    spec.sigma = get_num(j, path, "sigma", spec.sigma);
    spec.amp = get_num(j, path, "amp", spec.amp);
  } else if (spec.kind == "bimodal") {
    check_keys(j, path, {"kind", "separation", "sigma", "normalize"});
    spec.separation = get_num(j, path, "separation", spec.separation);
    spec.sigma = get_num(j, path, "sigma", spec.sigma);
  } else if (spec.kind == "spike_with_bath") {
    check_keys(j, path, {"kind", "spike_mass", "sigma", "normalize"});
    spec.spike_mass = get_num(j, path, "spike_mass", spec.spike_mass);
    spec.sigma = get_num(j, path, "sigma", 0.3);
  } else if (spec.kind == "shell") {
    check_keys(j, path, {"kind", "radius", "width", "amp", "normalize"});
    spec.radius = get_num(j, path, "radius", spec.radius);
    spec.width = get_num(j, path, "width", spec.width);
    spec.amp = get_num(j, path, "amp", spec.amp);
  } else if (spec.kind == "compact_bump") {
    check_keys(j, path, {"kind", "center", "radius", "amp", "normalize"});
    spec.center = get_center(j, path, "center", d);
    spec.radius = get_num(j, path, "radius", spec.radius);
    spec.amp = get_num(j, path, "amp", spec.amp);
  } else if (spec.kind == "shell_ladder") {
    check_keys(j, path, {"kind", "radii", "widths", "heights", "normalize"});
    spec.radii = get_num_list(j, path, "radii", {});
    spec.widths = get_num_list(j, path, "widths", {});
    spec.heights = get_num_list(j, path, "heights", {});
    if (spec.radii.empty() || spec.radii.size() != spec.widths.size() ||
        spec.radii.size() != spec.heights.size())
      cfg_error(path, "radii/widths/heights must be nonempty arrays of equal length");
  } else {
    cfg_error(path + ".kind",
              "unknown kind '" + spec.kind +
                  "' (valid: maxwellian, gaussian, bimodal, spike_with_bath, shell, "
                  "compact_bump, shell_ladder)");
  }
  spec.normalize = get_bool(j, path, "normalize", true);
  return spec;
}

FunctionalRequest parse_functional(const json& j, const std::string& path) {
  check_keys(j, path, {"kind", "s", "p"});
  FunctionalRequest req;
  const std::string kind = get_str(j, path, "kind", "");
  if (kind == "moment")
    req.kind = FunctionalRequest::Kind::Moment;
  else if (kind == "lp_moment")
    req.kind = FunctionalRequest::Kind::LpMoment;
  else if (kind == "dissipation")
    req.kind = FunctionalRequest::Kind::Dissipation;
  else
    cfg_error(path + ".kind", "expected moment | lp_moment | dissipation");
  req.s = get_num(j, path, "s", 0.0);
  req.p = get_num(j, path, "p", 2.0);
  if (req.kind != FunctionalRequest::Kind::Moment && !(req.p >= 1.0))
    cfg_error(path + ".p", "expected p >= 1");
  return req;
}

const std::set<std::string> kScenarios = {"run",      "conservation", "rates",           "moments",
                                          "poincare", "degiorgi",     "lorentz-selftest"};

// ---------------------------------------------------------------------------
// Trajectory persistence: diagnostics CSV, snapshot files, checkpoints.
// ---------------------------------------------------------------------------

std::string csv_header(const GridSpec& g, const SolverConfig& cfg) {
  std::string h = "time,dt,mass,mom_x";
  if (g.d >= 2) h += ",mom_y";
  if (g.d >= 3) h += ",mom_z";
  h += ",energy,entropy,k0";
  for (const auto& req : cfg.functionals) h += "," + req.column_name();
  return h;
}

std::string csv_row(const GridSpec& g, const DiagnosticsRow& r) {
  std::string line = format_g17(r.time) + "," + format_g17(r.dt) + "," + format_g17(r.mass);
  for (int a = 0; a < g.d; ++a) line += "," + format_g17(r.momentum[static_cast<std::size_t>(a)]);
  line += "," + format_g17(r.energy) + "," + format_g17(r.entropy_val) + "," + format_g17(r.k0);
  for (double x : r.extra) line += "," + format_g17(x);
  return line;
}

std::string snap_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snap_%06d.bin", index);
  return buf;
}

struct RestartState {
  ScalarField f;
  double time = 0.0;
  std::uint64_t step = 0;
  int snapshot_index = 0;
  std::string prefix_rows;  // CSV body rows preceding the checkpoint time
};

RestartState load_restart(const std::string& dir, const ExperimentConfig& cfg) {
  std::ifstream js(fs::path(dir) / "state.json");
  if (!js) throw std::runtime_error("restart: cannot open " + dir + "/state.json");
  json j = json::parse(js, nullptr, true);
  check_keys(j, "restart", {"schema_version", "time", "step", "snapshot_index", "gamma", "grid"});
  if (get_int(j, "restart", "schema_version", -1) != 1)
    cfg_error("restart.schema_version", "unsupported checkpoint schema");
  RestartState st;
  st.time = get_num(j, "restart", "time", 0.0);
  st.step = get_u64(j, "restart", "step", 0);
  st.snapshot_index = get_int(j, "restart", "snapshot_index", 0);
  const json& gj = j.at("grid");
  check_keys(gj, "restart.grid", {"d", "n", "half_width"});
  if (get_int(gj, "restart.grid", "d", 0) != cfg.d || get_int(gj, "restart.grid", "n", 0) != cfg.n ||
      get_num(gj, "restart.grid", "half_width", 0.0) != cfg.half_width)
    throw std::runtime_error("restart: checkpoint grid differs from the configured grid");
  if (get_num(j, "restart", "gamma", 1.0) != cfg.gamma)
    throw std::runtime_error("restart: checkpoint gamma differs from the configured gamma");

  Snapshot snap = read_snapshot((fs::path(dir) / "state.bin").string());
  if (snap.time != st.time)
    throw std::runtime_error("restart: state.bin time disagrees with state.json");
  st.f = std::move(snap.field);

  std::ifstream pf(fs::path(dir) / "diagnostics_prefix.csv");
  if (!pf) throw std::runtime_error("restart: cannot open " + dir + "/diagnostics_prefix.csv");
  std::string header;
  std::getline(pf, header);
  std::ostringstream body;
  body << pf.rdbuf();
  st.prefix_rows = body.str();
  return st;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// One resumable checkpoint: full-precision state, position metadata, and the
// diagnostics rows accumulated strictly before the checkpoint time.
void write_checkpoint(const fs::path& dir, const ExperimentConfig& cfg, const ScalarField& f,
                      double time, std::uint64_t step, int snapshot_index,
                      const std::string& header, const std::string& rows_before) {
  fs::create_directories(dir);
  write_snapshot((dir / "state.bin").string(), f, time);
  json j;
  j["schema_version"] = 1;
  j["time"] = time;
  j["step"] = step;
  j["snapshot_index"] = snapshot_index;
  j["gamma"] = cfg.gamma;
  j["grid"] = {{"d", cfg.d}, {"n", cfg.n}, {"half_width", cfg.half_width}};
  write_text(dir / "state.json", j.dump(2) + "\n");
  write_text(dir / "diagnostics_prefix.csv", header + "\n" + rows_before);
}

struct RunArtifacts {
  Trajectory traj;
  SolverConfig solver;  // functionals actually recorded
  std::string prefix_rows;
  int snap_offset = 0;
  double k0_initial = 0.0;
  double k0_min = 0.0;
};

// Integrates cfg's scenario trajectory (fresh or restarted) and persists
// diagnostics.csv, snapshot files and checkpoints under cfg.out_dir.
RunArtifacts integrate_and_persist(const ExperimentConfig& cfg, const SolverConfig& solver) {
  const GridSpec g = make_grid(cfg.d, cfg.n, cfg.half_width);
  KernelSet& ks = kernel_cache(g, cfg.gamma);

  RunArtifacts art;
  art.solver = solver;
  double t_start = 0.0;
  std::uint64_t step_start = 0;
  ScalarField f0;
  if (!cfg.restart_from.empty()) {
    RestartState st = load_restart(cfg.restart_from, cfg);
    f0 = std::move(st.f);
    t_start = st.time;
    step_start = st.step;
    art.snap_offset = st.snapshot_index;
    art.prefix_rows = std::move(st.prefix_rows);
  } else {
    f0 = build_initial(g, cfg.initial);
  }

  art.traj = run(f0, ks, solver, t_start, step_start);

  fs::create_directories(cfg.out_dir);
  const std::string header = csv_header(g, solver);
  write_diagnostics_csv((fs::path(cfg.out_dir) / "diagnostics.csv").string(), art.traj, solver,
                        art.prefix_rows);
  for (std::size_t i = 0; i < art.traj.snapshots.size(); ++i)
    write_snapshot((fs::path(cfg.out_dir) / snap_name(art.snap_offset + static_cast<int>(i))).string(),
                   art.traj.snapshots[i], art.traj.snap_times[i]);

  if (cfg.checkpoint_every > 0) {
    for (std::size_t i = 0; i < art.traj.snapshots.size(); ++i) {
      const int global = art.snap_offset + static_cast<int>(i);
      if (global == 0 || global % cfg.checkpoint_every != 0) continue;
      const double tc = art.traj.snap_times[i];
      const double eps_t = 1e-12 * std::max(1.0, std::abs(tc));
      std::string rows = art.prefix_rows;
      std::uint64_t steps_before = step_start;
      for (const auto& r : art.traj.rows) {
        if (r.time >= tc - eps_t) break;
        rows += csv_row(g, r) + "\n";
        ++steps_before;
      }
      char dname[40];
      std::snprintf(dname, sizeof(dname), "checkpoint_%06d", global);
      write_checkpoint(fs::path(cfg.out_dir) / dname, cfg, art.traj.snapshots[i], tc,
                       steps_before, global, header, rows);
    }
  }

  art.k0_initial = art.traj.rows.empty() ? 0.0 : art.traj.rows.front().k0;
  art.k0_min = art.k0_initial;
  for (const auto& r : art.traj.rows) art.k0_min = std::min(art.k0_min, r.k0);
  return art;
}

// Conservation drift metrics over the diagnostics rows.
struct DriftMetrics {
  double mass = 0.0;       // max |m(t) - m(0)|
  double momentum = 0.0;   // max component deviation from t = 0
  double energy = 0.0;     // max relative deviation
  double entropy_rise = 0.0;  // largest increase above the running minimum
  double duration = 0.0;
};

DriftMetrics drift_metrics(const Trajectory& traj) {
  DriftMetrics m;
  if (traj.rows.empty()) return m;
  const DiagnosticsRow& r0 = traj.rows.front();
  double hmin = r0.entropy_val;
  for (const auto& r : traj.rows) {
    m.mass = std::max(m.mass, std::abs(r.mass - r0.mass));
    for (int a = 0; a < traj.grid.d; ++a)
      m.momentum = std::max(m.momentum, std::abs(r.momentum[static_cast<std::size_t>(a)] -
                                                 r0.momentum[static_cast<std::size_t>(a)]));
    m.energy = std::max(m.energy, std::abs(r.energy - r0.energy) / std::abs(r0.energy));
    hmin = std::min(hmin, r.entropy_val);
    m.entropy_rise = std::max(m.entropy_rise, r.entropy_val - hmin);
  }
  m.duration = traj.rows.back().time - r0.time;
  return m;
}

json drift_json(const DriftMetrics& m) {
  return {{"mass", m.mass},
          {"momentum", m.momentum},
          {"energy_rel", m.energy},
          {"entropy_rise", m.entropy_rise},
          {"duration", m.duration}};
}

json base_report(const ExperimentConfig& cfg, const RunArtifacts& art) {
  json j;
  j["scenario"] = cfg.scenario;
  j["config"] = json::parse(cfg.config_echo.empty() ? "{}" : cfg.config_echo);
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  j["k0_initial"] = art.k0_initial;
  j["k0_min"] = art.k0_min;
  double min_f = 0.0;
  for (const auto& r : art.traj.rows) min_f = std::min(min_f, r.min_f);
  j["min_f"] = min_f;
  j["steps"] = art.traj.steps;
  j["clipped_cells"] = art.traj.clipped_cells;
  j["aborted"] = art.traj.aborted;
  if (art.traj.aborted) j["abort_reason"] = art.traj.abort_reason;
  j["snapshot_times"] = art.traj.snap_times;
  return j;
}

void write_report(const ExperimentConfig& cfg, const json& j) {
  write_text(fs::path(cfg.out_dir) / "report.json", j.dump(2) + "\n");
}

// Persist everything, then surface an aborted integration as an error
// ("checkpointed abort": artifacts are already on disk).
void throw_if_aborted(const ExperimentConfig& cfg, const RunArtifacts& art, json report) {
  if (!art.traj.aborted) return;
  report["pass"] = false;
  write_report(cfg, report);
  throw std::runtime_error("integration aborted: " + art.traj.abort_reason);
}

SolverConfig with_column(SolverConfig solver, FunctionalRequest::Kind kind, double s, double p) {
  for (const auto& req : solver.functionals)
    if (req.kind == kind && req.s == s && (kind == FunctionalRequest::Kind::Moment || req.p == p))
      return solver;
  FunctionalRequest req;
  req.kind = kind;
  req.s = s;
  req.p = p;
  solver.functionals.push_back(req);
  return solver;
}

std::size_t column_of(const SolverConfig& solver, FunctionalRequest::Kind kind, double s,
                      double p) {
  for (std::size_t i = 0; i < solver.functionals.size(); ++i) {
    const auto& req = solver.functionals[i];
    if (req.kind == kind && req.s == s && (kind == FunctionalRequest::Kind::Moment || req.p == p))
      return i;
  }
  throw std::invalid_argument("requested diagnostic column was not recorded: " +
                              FunctionalRequest{kind, s, p}.column_name());
}

json ratefit_json(const RateFit& fit) {
  json j;
  j["fitted"] = fit.fitted;
  j["pass"] = fit.pass;
  j["t_lo"] = fit.t_lo;
  j["t_hi"] = fit.t_hi;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["residual"] = fit.residual;
  j["target"] = fit.target;
  if (!fit.note.empty()) j["note"] = fit.note;
  return j;
}

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

int scenario_run(const ExperimentConfig& cfg) {
  RunArtifacts art = integrate_and_persist(cfg, cfg.solver);
  json rep = base_report(cfg, art);
  rep["drift"] = drift_json(drift_metrics(art.traj));
  throw_if_aborted(cfg, art, rep);
  rep["pass"] = true;
  write_report(cfg, rep);
  return 0;
}

int scenario_conservation(const ExperimentConfig& cfg) {
  RunArtifacts art = integrate_and_persist(cfg, cfg.solver);
  json rep = base_report(cfg, art);
  const DriftMetrics m = drift_metrics(art.traj);
  rep["drift"] = drift_json(m);
  throw_if_aborted(cfg, art, rep);

  const ConservationTolerances& tol = cfg.tolerances;
  const double slack = tol.entropy_slack * std::max(m.duration, 1e-300);
  json checks;
  checks["mass"] = m.mass <= tol.mass;
  checks["momentum"] = m.momentum <= tol.momentum;
  checks["energy"] = m.energy <= tol.energy;
  checks["entropy_nonincreasing"] = m.entropy_rise <= slack;
  rep["checks"] = checks;
  bool pass = true;
  for (const auto& item : checks.items()) pass = pass && item.value().get<bool>();
  rep["pass"] = pass;
  write_report(cfg, rep);
  return pass ? 0 : 2;
}

int scenario_rates(const ExperimentConfig& cfg) {
  const RatesBlock& rb = cfg.rates;
  SolverConfig solver =
      with_column(cfg.solver, FunctionalRequest::Kind::LpMoment, rb.s, rb.p);
  RunArtifacts art = integrate_and_persist(cfg, solver);
  json rep = base_report(cfg, art);
  throw_if_aborted(cfg, art, rep);

  RateFit fit = fit_appearance_rate(art.traj, solver, rb.s, rb.p, rb.slope_tol);
  rep["appearance_fit"] = ratefit_json(fit);

  // Long-time branch: the decayed norm must sit below a fixed plateau, by
  // default five times the equilibrium value of the same functional.
  double bound = rb.plateau_bound;
  if (bound <= 0.0) {
    const ScalarField eq = fields::maxwellian(art.traj.grid);
    bound = 5.0 * M_sp(eq, rb.s, rb.p);
  }
  const std::size_t col = column_of(solver, FunctionalRequest::Kind::LpMoment, rb.s, rb.p);
  double plateau = 0.0;
  bool have_late = false;
  for (const auto& r : art.traj.rows)
    if (r.time >= rb.t_plateau) {
      plateau = std::max(plateau, r.extra[col]);
      have_late = true;
    }
  const bool plateau_ok = have_late && plateau <= bound;
  rep["plateau"] = {{"t_from", rb.t_plateau},
                    {"max_value", plateau},
                    {"bound", bound},
                    {"pass", plateau_ok}};
  const bool pass = fit.fitted && fit.pass && plateau_ok;
  rep["pass"] = pass;
  write_report(cfg, rep);
  return pass ? 0 : 2;
}

int scenario_moments(const ExperimentConfig& cfg) {
  const MomentsBlock& mb = cfg.moments;
  SolverConfig solver = with_column(cfg.solver, FunctionalRequest::Kind::Moment, mb.s, 2.0);
  solver = with_column(solver, FunctionalRequest::Kind::Moment, 2.0, 2.0);
  RunArtifacts art = integrate_and_persist(cfg, solver);
  json rep = base_report(cfg, art);
  throw_if_aborted(cfg, art, rep);

  RateFit fit = fit_moment_growth(art.traj, solver, mb.s, mb.envelope);
  rep["growth_fit"] = ratefit_json(fit);

  // m_2 = mass + energy under the bracket weight; its drift must stay within
  // the energy conservation tolerance.
  const std::size_t c2 = column_of(solver, FunctionalRequest::Kind::Moment, 2.0, 2.0);
  double m2_0 = art.traj.rows.empty() ? 0.0 : art.traj.rows.front().extra[c2];
  double m2_drift = 0.0;
  for (const auto& r : art.traj.rows)
    m2_drift = std::max(m2_drift, std::abs(r.extra[c2] - m2_0) / std::abs(m2_0));
  const bool m2_ok = m2_drift <= cfg.tolerances.energy;
  rep["m2_drift_rel"] = m2_drift;
  rep["m2_conserved"] = m2_ok;
  const bool pass = fit.fitted && fit.pass && m2_ok;
  rep["pass"] = pass;
  write_report(cfg, rep);
  return pass ? 0 : 2;
}

int scenario_poincare(const ExperimentConfig& cfg) {
  const PoincareBlock& pb = cfg.poincare;
  if (pb.gammas.empty()) cfg_error("poincare.gammas", "expected at least one gamma");
  const GridSpec g = make_grid(cfg.d, cfg.n, cfg.half_width);
  const ScalarField f = build_initial(g, cfg.initial);

  std::vector<double> eps_list;
  for (int k = pb.eps_decades * pb.eps_per_decade; k >= 0; --k)
    eps_list.push_back(pb.eps_max * std::pow(10.0, -static_cast<double>(k) / pb.eps_per_decade));

  fs::create_directories(cfg.out_dir);
  json rep;
  rep["scenario"] = cfg.scenario;
  rep["config"] = json::parse(cfg.config_echo.empty() ? "{}" : cfg.config_echo);
  rep["seed"] = cfg.seed;
  json entries = json::array();
  bool pass = true;
  for (double gamma : pb.gammas) {
    KernelSet ks(g, gamma);  // local: spectra freed before the next gamma
    PoincareFamilyConfig fam;
    fam.seed = pb.family_seed;
    fam.random_members = pb.random_members;
    PoincareReport pr = estimate_C_of_eps(ks, f, eps_list, fam);

    std::string csv = "eps,C,family_argmax_id\n";
    for (std::size_t i = 0; i < pr.eps.size(); ++i)
      csv += format_g17(pr.eps[i]) + "," + format_g17(pr.C[i]) + "," +
             std::to_string(pr.argmax_id[i]) + "\n";
    std::ostringstream name;
    name << "poincare_gamma_" << gamma << ".csv";
    write_text(fs::path(cfg.out_dir) / name.str(), csv);

    json e;
    e["gamma"] = gamma;
    e["slope"] = pr.slope;
    e["window"] = {pr.window_lo, pr.window_hi};
    e["window_slopes"] = pr.window_slopes;
    e["family"] = pr.family_descriptor;
    e["family_size"] = pr.family_size;
    e["csv"] = name.str();
    const bool critical = std::abs(gamma + 2.0) < 1e-12;
    bool ok;
    if (critical) {
      // No stable power law: the decade-window slopes must drift.
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      int valid = 0;
      for (double w : pr.window_slopes)
        if (std::isfinite(w)) {
          lo = std::min(lo, w);
          hi = std::max(hi, w);
          ++valid;
        }
      const double drift = valid >= 2 ? hi - lo : std::numeric_limits<double>::infinity();
      e["slope_drift"] = drift;
      ok = drift >= pb.critical_drift_min;
    } else {
      const double target = gamma / (2.0 + gamma);
      e["target"] = target;
      ok = std::isfinite(pr.slope) && std::abs(pr.slope - target) <= pb.slope_tol * std::abs(target);
    }
    e["pass"] = ok;
    pass = pass && ok;
    entries.push_back(std::move(e));
  }
  rep["gammas"] = std::move(entries);
  rep["pass"] = pass;
  write_report(cfg, rep);
  return pass ? 0 : 2;
}

int scenario_degiorgi(const ExperimentConfig& cfg) {
  const DeGiorgiBlock& db = cfg.degiorgi;
  DeGiorgiConfig dcfg = db.cfg;
  dcfg.gamma = cfg.gamma;
  if (!(dcfg.T <= cfg.solver.t_end))
    cfg_error("degiorgi.T", "window end exceeds solver.t_end");
  if (!(cfg.solver.snapshot_interval <= (dcfg.T - dcfg.t_star) / 16.0))
    cfg_error("solver.snapshot_interval",
              "too coarse for the energy windows; need <= (T - t_star)/16");

  RunArtifacts art = integrate_and_persist(cfg, cfg.solver);
  json rep = base_report(cfg, art);
  throw_if_aborted(cfg, art, rep);

  if (dcfg.c0 <= 0.0) dcfg.c0 = art.k0_min / 4.0;
  if (!(dcfg.c0 > 0.0)) throw std::runtime_error("measured coercivity floor is zero");
  rep["c0"] = dcfg.c0;

  const SnapshotSeries series = art.traj.series();
  double C_ledger = 0.0;
  if (db.mode == "ledger") {
    C_ledger = back_solve_C(series, dcfg);
    dcfg.C_empirical = C_ledger;
    rep["C_ledger"] = C_ledger;
  }
  DeGiorgiTrace tr = iterate(series, dcfg);

  std::string csv = "n,ell_n,t_n,E_n,target\n";
  for (std::size_t n = 0; n < tr.E.size(); ++n)
    csv += std::to_string(n) + "," + format_g17(tr.levels[n]) + "," + format_g17(tr.times[n]) +
           "," + format_g17(tr.E[n]) + "," + format_g17(tr.target[n]) + "\n";
  write_text(fs::path(cfg.out_dir) / "degiorgi.csv", csv);

  const double ratio = tr.sup_f > 0.0 ? tr.K_bisect / tr.sup_f : 0.0;
  const bool ratio_ok = ratio > 0.0 && ratio <= db.factor_tol && ratio >= 1.0 / db.factor_tol;
  json verdict;
  verdict["mode"] = db.mode;
  verdict["Q"] = tr.Q;
  verdict["E0"] = tr.E0;
  verdict["y_s"] = tr.y_s;
  verdict["K_used"] = tr.K_used;
  verdict["K_bisect"] = tr.K_bisect;
  verdict["K_formula"] = {{"K", tr.K_formula.K},
                          {"K1", tr.K_formula.K1},
                          {"K2", tr.K_formula.K2},
                          {"K3", tr.K_formula.K3},
                          {"K_sum", tr.K_formula.K_sum}};
  verdict["sup_f"] = tr.sup_f;
  verdict["bisect_over_sup"] = ratio;
  verdict["decay_pass"] = tr.decay_pass;
  verdict["decay_violations"] = tr.decay_violations;
  verdict["flagged_n"] = tr.flagged_n;
  const bool pass = tr.decay_pass && ratio_ok;
  verdict["pass"] = pass;
  rep["verdict"] = verdict;
  rep["pass"] = pass;
  write_report(cfg, rep);
  return pass ? 0 : 2;
}

int scenario_lorentz(const ExperimentConfig& cfg) {
  LorentzSelfTest rep = lorentz_selftest(cfg.lorentz.field_count, cfg.lorentz.seed);
  fs::create_directories(cfg.out_dir);
  json j;
  j["scenario"] = cfg.scenario;
  j["config"] = json::parse(cfg.config_echo.empty() ? "{}" : cfg.config_echo);
  j["equimeasurability_gap"] = rep.equimeasurability_gap;
  j["pp_vs_lp_gap"] = rep.pp_vs_lp_gap;
  j["norm_identity_gap"] = rep.norm_identity_gap;
  j["indicator_gap"] = rep.indicator_gap;
  j["max_holder_ratio"] = rep.max_holder_ratio;
  j["max_interpolation_ratio"] = rep.max_interpolation_ratio;
  j["sobolev_spread"] = rep.sobolev_spread;
  j["fields_checked"] = rep.fields_checked;
  j["pass"] = rep.pass;
  write_report(cfg, j);

  // one row per check: measured value against the bound it must not exceed
  std::string csv = "check,value,bound,pass\n";
  auto row = [&](const char* name, double value, double bound) {
    csv += std::string(name) + "," + format_g17(value) + "," + format_g17(bound) + "," +
           (value <= bound ? "1" : "0") + "\n";
  };
  row("equimeasurability_gap", rep.equimeasurability_gap, 0.0);
  row("pp_vs_lp_gap", rep.pp_vs_lp_gap, 1e-12);
  row("norm_identity_gap", rep.norm_identity_gap, 1e-10);
  row("indicator_gap", rep.indicator_gap, 1e-10);
  row("max_holder_ratio", rep.max_holder_ratio, 1.0 + 1e-12);
  row("max_interpolation_ratio", rep.max_interpolation_ratio, 1.0 + 1e-12);
  row("sobolev_spread", rep.sobolev_spread, 0.02);
  write_text(fs::path(cfg.out_dir) / "selftest.csv", csv);
  return rep.pass ? 0 : 2;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public surface
// ---------------------------------------------------------------------------

ScalarField build_initial(const GridSpec& g, const InitialSpec& spec) {
  ScalarField f;
  if (spec.kind == "maxwellian")
    f = fields::maxwellian(g);
  else if (spec.kind == "gaussian")
    f = fields::gaussian(g, spec.center, spec.sigma, spec.amp);
  else if (spec.kind == "bimodal")
    f = fields::bimodal(g, spec.separation, spec.sigma);
  else if (spec.kind == "spike_with_bath")
    f = fields::spike_with_bath(g, spec.spike_mass, spec.sigma);
  else if (spec.kind == "shell")
    f = fields::shell(g, spec.radius, spec.width, spec.amp);
  else if (spec.kind == "compact_bump")
    f = fields::compact_bump(g, spec.center, spec.radius, spec.amp);
  else if (spec.kind == "shell_ladder")
    f = fields::shell_ladder(g, spec.radii, spec.widths, spec.heights);
  else
    throw std::invalid_argument("unknown initial kind '" + spec.kind + "'");
  return spec.normalize ? normalize_initial(f) : f;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j, "<root>",
             {"schema_version", "scenario", "grid", "gamma", "seed", "out_dir", "initial",
              "solver", "functionals", "tolerances", "checkpoint_every", "restart_from", "rates",
              "moments", "poincare", "degiorgi", "lorentz"});
  if (get_int(j, "<root>", "schema_version", -1) != 1)
    cfg_error("schema_version", "expected 1");

  ExperimentConfig cfg;
  cfg.scenario = get_str(j, "<root>", "scenario", "");
  if (!kScenarios.count(cfg.scenario)) {
    std::string valid;
    for (const auto& s : kScenarios) valid += (valid.empty() ? "" : ", ") + s;
    cfg_error("scenario", "unknown scenario '" + cfg.scenario + "' (valid: " + valid + ")");
  }
  if (j.contains("grid")) {
    const json& gj = j["grid"];
    check_keys(gj, "grid", {"d", "n", "half_width"});
    cfg.d = get_int(gj, "grid", "d", cfg.d);
    cfg.n = get_int(gj, "grid", "n", cfg.n);
    cfg.half_width = get_num(gj, "grid", "half_width", cfg.half_width);
  }
  make_grid(cfg.d, cfg.n, cfg.half_width);  // re-check module constraints
  cfg.gamma = get_num(j, "<root>", "gamma", cfg.gamma);
  if (!(cfg.gamma >= -2.0 && cfg.gamma < 0.0))
    cfg_error("gamma", "expected a value in [-2, 0)");
  cfg.seed = get_u64(j, "<root>", "seed", cfg.seed);
  cfg.out_dir = get_str(j, "<root>", "out_dir", cfg.out_dir);
  if (j.contains("initial")) cfg.initial = parse_initial(j["initial"], cfg.d);
  if (j.contains("solver")) {
    const json& sj = j["solver"];
    check_keys(sj, "solver",
               {"cfl", "t_end", "snapshot_interval", "scheme", "flux", "positivity_floor"});
    cfg.solver.cfl = get_num(sj, "solver", "cfl", cfg.solver.cfl);
    cfg.solver.t_end = get_num(sj, "solver", "t_end", cfg.solver.t_end);
    cfg.solver.snapshot_interval =
        get_num(sj, "solver", "snapshot_interval", cfg.solver.snapshot_interval);
    const std::string scheme = get_str(sj, "solver", "scheme", "rk2");
    if (scheme == "euler")
      cfg.solver.scheme = TimeScheme::Euler;
    else if (scheme == "rk2")
      cfg.solver.scheme = TimeScheme::RK2;
    else
      cfg_error("solver.scheme", "expected \"euler\" or \"rk2\"");
    const std::string flux = get_str(sj, "solver", "flux", "log");
    if (flux == "gradient")
      cfg.solver.flux = FluxForm::Gradient;
    else if (flux == "log")
      cfg.solver.flux = FluxForm::LogGradient;
    else
      cfg_error("solver.flux", "expected \"gradient\" or \"log\"");
    cfg.solver.positivity_floor =
        get_bool(sj, "solver", "positivity_floor", cfg.solver.positivity_floor);
  }
  cfg.solver.gamma = cfg.gamma;
  if (!(cfg.solver.cfl > 0.0 && cfg.solver.cfl <= 1.0)) cfg_error("solver.cfl", "expected (0, 1]");
  if (!(cfg.solver.t_end > 0.0)) cfg_error("solver.t_end", "expected > 0");
  if (!(cfg.solver.snapshot_interval > 0.0))
    cfg_error("solver.snapshot_interval", "expected > 0");
  if (j.contains("functionals")) {
    if (!j["functionals"].is_array()) cfg_error("functionals", "expected an array");
    int idx = 0;
    for (const auto& e : j["functionals"])
      cfg.solver.functionals.push_back(
          parse_functional(e, "functionals[" + std::to_string(idx++) + "]"));
  }
  if (j.contains("tolerances")) {
    const json& tj = j["tolerances"];
    check_keys(tj, "tolerances", {"mass", "momentum", "energy", "entropy_slack"});
    cfg.tolerances.mass = get_num(tj, "tolerances", "mass", cfg.tolerances.mass);
    cfg.tolerances.momentum = get_num(tj, "tolerances", "momentum", cfg.tolerances.momentum);
    cfg.tolerances.energy = get_num(tj, "tolerances", "energy", cfg.tolerances.energy);
    cfg.tolerances.entropy_slack =
        get_num(tj, "tolerances", "entropy_slack", cfg.tolerances.entropy_slack);
  }
  cfg.checkpoint_every = get_int(j, "<root>", "checkpoint_every", 0);
  if (cfg.checkpoint_every < 0) cfg_error("checkpoint_every", "expected >= 0");
  cfg.restart_from = get_str(j, "<root>", "restart_from", "");
  if (j.contains("rates")) {
    const json& rj = j["rates"];
    check_keys(rj, "rates", {"s", "p", "slope_tol", "plateau_bound", "t_plateau"});
    cfg.rates.s = get_num(rj, "rates", "s", cfg.rates.s);
    cfg.rates.p = get_num(rj, "rates", "p", cfg.rates.p);
    if (!(cfg.rates.p > 1.0)) cfg_error("rates.p", "expected p > 1");
    cfg.rates.slope_tol = get_num(rj, "rates", "slope_tol", cfg.rates.slope_tol);
    cfg.rates.plateau_bound = get_num(rj, "rates", "plateau_bound", cfg.rates.plateau_bound);
    cfg.rates.t_plateau = get_num(rj, "rates", "t_plateau", cfg.rates.t_plateau);
  }
  if (j.contains("moments")) {
    const json& mj = j["moments"];
    check_keys(mj, "moments", {"s", "envelope"});
    cfg.moments.s = get_num(mj, "moments", "s", cfg.moments.s);
    if (!(cfg.moments.s > 2.0)) cfg_error("moments.s", "expected s > 2");
    cfg.moments.envelope = get_num(mj, "moments", "envelope", cfg.moments.envelope);
  }
  if (j.contains("poincare")) {
    const json& pj = j["poincare"];
    check_keys(pj, "poincare",
               {"gammas", "eps_max", "eps_decades", "eps_per_decade", "family_seed",
                "random_members", "slope_tol", "critical_drift_min"});
    cfg.poincare.gammas = get_num_list(pj, "poincare", "gammas", cfg.poincare.gammas);
    for (double gm : cfg.poincare.gammas)
      if (!(gm >= -2.0 && gm < 0.0)) cfg_error("poincare.gammas", "entries must lie in [-2, 0)");
    cfg.poincare.eps_max = get_num(pj, "poincare", "eps_max", cfg.poincare.eps_max);
    cfg.poincare.eps_decades = get_int(pj, "poincare", "eps_decades", cfg.poincare.eps_decades);
    cfg.poincare.eps_per_decade =
        get_int(pj, "poincare", "eps_per_decade", cfg.poincare.eps_per_decade);
    if (cfg.poincare.eps_decades < 1 || cfg.poincare.eps_per_decade < 1)
      cfg_error("poincare", "eps_decades and eps_per_decade must be >= 1");
    cfg.poincare.family_seed = get_u64(pj, "poincare", "family_seed", cfg.poincare.family_seed);
    cfg.poincare.random_members =
        get_int(pj, "poincare", "random_members", cfg.poincare.random_members);
    cfg.poincare.slope_tol = get_num(pj, "poincare", "slope_tol", cfg.poincare.slope_tol);
    cfg.poincare.critical_drift_min =
        get_num(pj, "poincare", "critical_drift_min", cfg.poincare.critical_drift_min);
  }
  if (j.contains("degiorgi")) {
    const json& dj = j["degiorgi"];
    check_keys(dj, "degiorgi",
               {"s", "p_gamma", "alpha", "t_star", "T", "n_max", "c0", "K", "C_empirical", "mode",
                "factor_tol"});
    DeGiorgiConfig& dc = cfg.degiorgi.cfg;
    dc.s = get_num(dj, "degiorgi", "s", dc.s);
    dc.p_gamma = get_num(dj, "degiorgi", "p_gamma", dc.p_gamma);
    dc.alpha = get_num(dj, "degiorgi", "alpha", dc.alpha);
    dc.t_star = get_num(dj, "degiorgi", "t_star", dc.t_star);
    dc.T = get_num(dj, "degiorgi", "T", dc.T);
    dc.n_max = get_int(dj, "degiorgi", "n_max", dc.n_max);
    dc.c0 = get_num(dj, "degiorgi", "c0", dc.c0);
    dc.K = get_num(dj, "degiorgi", "K", dc.K);
    dc.C_empirical = get_num(dj, "degiorgi", "C_empirical", dc.C_empirical);
    cfg.degiorgi.mode = get_str(dj, "degiorgi", "mode", cfg.degiorgi.mode);
    if (cfg.degiorgi.mode != "property" && cfg.degiorgi.mode != "ledger")
      cfg_error("degiorgi.mode", "expected property | ledger");
    cfg.degiorgi.factor_tol = get_num(dj, "degiorgi", "factor_tol", cfg.degiorgi.factor_tol);
    if (!(dc.t_star > 0.0 && dc.t_star < dc.T)) cfg_error("degiorgi", "need 0 < t_star < T");
    if (dc.n_max < 1) cfg_error("degiorgi.n_max", "expected >= 1");
  }
  if (j.contains("lorentz")) {
    const json& lj = j["lorentz"];
    check_keys(lj, "lorentz", {"field_count", "seed"});
    cfg.lorentz.field_count = get_int(lj, "lorentz", "field_count", cfg.lorentz.field_count);
    if (cfg.lorentz.field_count < 1) cfg_error("lorentz.field_count", "expected >= 1");
    cfg.lorentz.seed = get_u64(lj, "lorentz", "seed", cfg.lorentz.seed);
  }
  cfg.config_echo = j.dump(2);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<ExperimentConfig> load_config_list(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  std::vector<ExperimentConfig> out;
  if (j.is_object() && j.contains("configs")) {
    check_keys(j, "<root>", {"schema_version", "configs"});
    if (get_int(j, "<root>", "schema_version", -1) != 1)
      cfg_error("schema_version", "expected 1");
    if (!j["configs"].is_array() || j["configs"].empty())
      cfg_error("configs", "expected a nonempty array of configs");
    for (const auto& e : j["configs"]) out.push_back(parse_config(e.dump()));
  } else {
    out.push_back(parse_config(ss.str()));
  }
  return out;
}

int configured_threads() {
  const char* env = std::getenv("LANDAU_THREADS");
  if (!env) return 1;
  const int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

void write_diagnostics_csv(const std::string& path, const Trajectory& traj,
                           const SolverConfig& cfg, const std::string& prefix_rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << csv_header(traj.grid, cfg) << "\n" << prefix_rows;
  for (const auto& r : traj.rows) out << csv_row(traj.grid, r) << "\n";
}

RateFit fit_appearance_rate(const Trajectory& traj, const SolverConfig& cfg, double s, double p,
                            double rel_tol) {
  const std::size_t col = column_of(cfg, FunctionalRequest::Kind::LpMoment, s, p);
  RateFit fit;
  fit.target = -0.5 * traj.grid.d * (p - 1.0);
  if (traj.rows.size() < 8) {
    fit.note = "trajectory too short";
    return fit;
  }
  std::vector<double> t, M;
  for (const auto& r : traj.rows) {
    t.push_back(r.time);
    M.push_back(r.extra[col]);
  }
  const double M_first = M.front();
  double M_min = M.front();
  for (double m : M) M_min = std::min(M_min, m);
  // Decay window: below half the initial value, above 4x the global minimum.
  std::vector<char> ok(t.size(), 0);
  for (std::size_t i = 0; i < t.size(); ++i)
    ok[i] = (t[i] > 0.0 && M[i] <= 0.5 * M_first && M[i] >= 4.0 * M_min && M[i] > 0.0);
  // Longest contiguous near-monotone decreasing stretch of admissible rows.
  std::size_t best_a = 0, best_b = 0;
  std::size_t a = 0;
  while (a < t.size()) {
    if (!ok[a]) {
      ++a;
      continue;
    }
    std::size_t b = a;
    while (b + 1 < t.size() && ok[b + 1] && M[b + 1] <= M[b] * (1.0 + 1e-3)) ++b;
    if (b - a > best_b - best_a) {
      best_a = a;
      best_b = b;
    }
    a = b + 1;
  }
  if (best_b - best_a + 1 < 6) {
    fit.note = "no decay window (fewer than 6 admissible monotone samples)";
    return fit;
  }
  std::vector<double> lx, ly;
  for (std::size_t i = best_a; i <= best_b; ++i) {
    lx.push_back(std::log(t[i]));
    ly.push_back(std::log(M[i]));
  }
  const LinearFit lf = linear_fit(lx, ly);
  fit.fitted = true;
  fit.t_lo = t[best_a];
  fit.t_hi = t[best_b];
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  for (std::size_t i = 0; i < lx.size(); ++i)
    fit.residual = std::max(fit.residual, std::abs(ly[i] - (lf.intercept + lf.slope * lx[i])));
  fit.pass = std::abs(fit.slope - fit.target) <= rel_tol * std::abs(fit.target);
  return fit;
}

RateFit fit_moment_growth(const Trajectory& traj, const SolverConfig& cfg, double s,
                          double envelope) {
  if (!(s > 2.0)) throw std::invalid_argument("fit_moment_growth needs s > 2");
  const std::size_t col = column_of(cfg, FunctionalRequest::Kind::Moment, s, 2.0);
  RateFit fit;
  if (traj.rows.size() < 2) {
    fit.note = "trajectory too short";
    return fit;
  }
  std::vector<double> t, m;
  for (const auto& r : traj.rows) {
    t.push_back(r.time);
    m.push_back(r.extra[col]);
  }
  const LinearFit lf = linear_fit(t, m);
  fit.fitted = true;
  fit.t_lo = t.front();
  fit.t_hi = t.back();
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  double scale = 0.0, excess = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    scale = std::max(scale, std::abs(m[i]));
    excess = std::max(excess, m[i] - (lf.intercept + lf.slope * t[i]));
  }
  fit.residual = scale > 0.0 ? excess / scale : 0.0;
  fit.pass = std::isfinite(fit.slope) && excess <= envelope * scale;
  return fit;
}

LorentzSelfTest lorentz_selftest(int field_count, std::uint64_t seed) {
  LorentzSelfTest rep;
  const GridSpec g = make_grid(3, 24, 6.0);

  // Exact structural identities on one representative random field.
  fields::Rng rng(seed);
  {
    const ScalarField f = fields::band_limited_random(g, rng, 10, 3.0, 1.5);
    const StepFunction d1 = distribution(f);
    const StepFunction d2 = distribution_of(rearrangement(f));
    double gap = 0.0;
    for (double x : d1.t) {
      gap = std::max(gap, std::abs(d1.value(x) - d2.value(x)));
      gap = std::max(gap, std::abs(d1.value(x * (1.0 - 1e-9)) - d2.value(x * (1.0 - 1e-9))));
    }
    gap = std::max(gap, std::abs(d1.value(0.0) - d2.value(0.0)));
    rep.equimeasurability_gap = gap;

    for (double p : {1.5, 2.0, 3.0}) {
      double lp = 0.0;
      for (double v : f.v) lp += std::pow(std::abs(v), p);
      lp = std::pow(lp * g.cell_volume(), 1.0 / p);
      rep.pp_vs_lp_gap =
          std::max(rep.pp_vs_lp_gap, std::abs(lorentz_norm(f, p, p) - lp) / std::max(lp, 1e-300));
    }
    for (auto [p, q] : {std::pair{2.0, 1.0}, {2.0, 3.0}, {2.25, 2.25}, {3.0, 2.0}}) {
      const double a = lorentz_norm(f, p, q);
      const double b = lorentz_norm_via_distribution(f, p, q);
      rep.norm_identity_gap =
          std::max(rep.norm_identity_gap, std::abs(a - b) / std::max(std::abs(a), 1e-300));
    }
  }

  // Indicator of a centered ball: ||1_E||_{p,q} = (p/q)^{1/q} m^{1/p}.
  {
    ScalarField ind = make_scalar(g);
    std::int64_t count = 0;
    for (std::int64_t i = 0; i < g.cells; ++i) {
      const auto x = g.node(i);
      const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
      if (r2 <= 4.0) {
        ind.v[static_cast<std::size_t>(i)] = 1.0;
        ++count;
      }
    }
    const double m = static_cast<double>(count) * g.cell_volume();
    for (auto [p, q] : {std::pair{2.0, 1.0}, {1.5, 3.0}, {2.25, 2.25}, {3.0, 2.0}}) {
      const double expect = std::pow(p / q, 1.0 / q) * std::pow(m, 1.0 / p);
      rep.indicator_gap = std::max(
          rep.indicator_gap, std::abs(lorentz_norm(ind, p, q) - expect) / expect);
    }
  }

  // Hoelder and interpolation ratios stay at most 1 across seeded fields.
  for (int k = 0; k < field_count; ++k) {
    const ScalarField f = fields::band_limited_random(g, rng, 8, 3.0, 1.5);
    const ScalarField h = fields::band_limited_random(g, rng, 8, 3.0, 1.5);
    rep.max_holder_ratio = std::max(rep.max_holder_ratio, holder_lorentz_ratio(f, h, 2.0, 2.0));
    rep.max_holder_ratio =
        std::max(rep.max_holder_ratio, holder_lorentz_ratio(f, h, 1.5, 3.0));
    rep.max_interpolation_ratio =
        std::max(rep.max_interpolation_ratio, interpolation_ratio(f, 2.0, 2.0, 1.5, 3.0));
    rep.max_interpolation_ratio =
        std::max(rep.max_interpolation_ratio, interpolation_ratio(f, 2.0, 1.0, 1.25, 4.0));
    rep.fields_checked += 2;
  }

  // Sobolev-Lorentz ratio must not see the Gaussian width. Finer grid here:
  // the centered-difference gradient error scales like (h/width)^2 and would
  // otherwise dominate the spread.
  {
    const GridSpec gs = make_grid(3, 64, 6.0);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double w : {0.7, 1.0, 1.4}) {
      const double r = sobolev_lorentz_ratio(fields::gaussian(gs, {0.0, 0.0, 0.0}, w), 2.0);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    rep.sobolev_spread = (hi - lo) / (0.5 * (hi + lo));
  }

  rep.pass = rep.equimeasurability_gap == 0.0 && rep.pp_vs_lp_gap <= 1e-12 &&
             rep.norm_identity_gap <= 1e-10 && rep.indicator_gap <= 1e-10 &&
             rep.max_holder_ratio <= 1.0 + 1e-12 &&
             rep.max_interpolation_ratio <= 1.0 + 1e-12 && rep.sobolev_spread <= 0.02;
  return rep;
}

int run_scenario(const ExperimentConfig& cfg) {
#ifdef _OPENMP
  omp_set_num_threads(configured_threads());
#endif
  if (cfg.scenario == "run") return scenario_run(cfg);
  if (cfg.scenario == "conservation") return scenario_conservation(cfg);
  if (cfg.scenario == "rates") return scenario_rates(cfg);
  if (cfg.scenario == "moments") return scenario_moments(cfg);
  if (cfg.scenario == "poincare") return scenario_poincare(cfg);
  if (cfg.scenario == "degiorgi") return scenario_degiorgi(cfg);
  if (cfg.scenario == "lorentz-selftest") return scenario_lorentz(cfg);
  throw std::invalid_argument("unknown scenario '" + cfg.scenario + "'");
}

int run_scenarios(const std::vector<ExperimentConfig>& cfgs) {
  if (cfgs.empty()) return 0;
  if (cfgs.size() == 1) return run_scenario(cfgs.front());
  const int workers =
      std::max(1, std::min<int>(configured_threads(), static_cast<int>(cfgs.size())));
  std::vector<int> codes(cfgs.size(), 0);
  std::vector<std::string> errors(cfgs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfgs.size()) return;
      try {
        codes[i] = run_scenario(cfgs[i]);
      } catch (const std::exception& e) {
        codes[i] = 1;
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  int code = 0;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    if (!errors[i].empty())
      throw std::runtime_error("scenario '" + cfgs[i].scenario + "' failed: " + errors[i]);
    code = std::max(code, codes[i]);
  }
  return code;
}

}  // namespace landau
