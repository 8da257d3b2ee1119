#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "landau/harness.hpp"
#include "landau/solver.hpp"
#include "landau/test_fields.hpp"

using namespace landau;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// expects parse_config to reject `text` with an error naming `field`
void expect_rejected(const std::string& text, const std::string& field) {
  try {
    parse_config(text);
    FAIL_CHECK("config accepted but should name ", field);
  } catch (const std::exception& e) {
    const std::string what = e.what();
    CHECK_MESSAGE(what.find(field) != std::string::npos, "error '", what,
                  "' does not name '", field, "'");
  }
}

fs::path fresh_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "landau_harness_tests" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("config parsing applies documented defaults") {
  const ExperimentConfig cfg = parse_config(R"({"schema_version":1,"scenario":"run"})");
  CHECK(cfg.scenario == "run");
  CHECK(cfg.d == 3);
  CHECK(cfg.n == 32);
  CHECK(cfg.half_width == 8.0);
  CHECK(cfg.gamma == -1.0);
  CHECK(cfg.initial.kind == "maxwellian");
  CHECK(cfg.initial.normalize);
  CHECK(cfg.solver.cfl == 0.4);
  CHECK(cfg.solver.t_end == 1.0);
  CHECK(cfg.solver.scheme == TimeScheme::RK2);
  CHECK(cfg.solver.flux == FluxForm::LogGradient);
  CHECK_FALSE(cfg.solver.positivity_floor);
  CHECK(cfg.solver.functionals.empty());
  CHECK(cfg.checkpoint_every == 0);
  CHECK(cfg.restart_from.empty());
  CHECK(cfg.tolerances.mass == 1e-13);
  CHECK(cfg.tolerances.energy == 1e-4);

  // the canonical echo re-parses to the same configuration
  REQUIRE_FALSE(cfg.config_echo.empty());
  const ExperimentConfig again = parse_config(cfg.config_echo);
  CHECK(again.scenario == cfg.scenario);
  CHECK(again.n == cfg.n);
  CHECK(again.gamma == cfg.gamma);
  CHECK(again.solver.cfl == cfg.solver.cfl);
}

TEST_CASE("config parsing is strict: unknown keys and bad values name their field") {
  expect_rejected(R"({"scenario":"run"})", "schema_version");
  expect_rejected(R"({"schema_version":1,"scenario":"run","bogus":1})", "bogus");
  expect_rejected(R"({"schema_version":1,"scenario":"warp"})", "scenario");
  expect_rejected(R"({"schema_version":1,"scenario":"run","grid":{"d":3,"n":32,"spacing":1}})",
                  "spacing");
  expect_rejected(R"({"schema_version":1,"scenario":"run","grid":{"d":3,"n":31,"half_width":8}})",
                  "n");
  expect_rejected(R"({"schema_version":1,"scenario":"run","gamma":0.5})", "gamma");
  expect_rejected(R"({"schema_version":1,"scenario":"run","gamma":-2.5})", "gamma");
  expect_rejected(R"({"schema_version":1,"scenario":"run","solver":{"stepper":"rk2"}})",
                  "stepper");
  expect_rejected(R"({"schema_version":1,"scenario":"run","solver":{"scheme":"rk8"}})",
                  "scheme");
  expect_rejected(R"({"schema_version":1,"scenario":"run","solver":{"flux":"upwind"}})", "flux");
  expect_rejected(R"({"schema_version":1,"scenario":"run","functionals":{"kind":"moment"}})",
                  "functionals");
  expect_rejected(
      R"({"schema_version":1,"scenario":"run","functionals":[{"kind":"median","s":1}]})",
      "functionals[0].kind");
  expect_rejected(R"({"schema_version":1,"scenario":"run","checkpoint_every":-1})",
                  "checkpoint_every");
  expect_rejected(R"({"schema_version":1,"scenario":"run","initial":{"kind":"vortex"}})",
                  "initial");

  // boundary values that must be accepted
  CHECK(parse_config(R"({"schema_version":1,"scenario":"run","gamma":-2})").gamma == -2.0);
  const ExperimentConfig with_cols = parse_config(
      R"({"schema_version":1,"scenario":"run","functionals":[
           {"kind":"moment","s":4},
           {"kind":"lp_moment","s":0,"p":2},
           {"kind":"dissipation","s":2,"p":2}]})");
  REQUIRE(with_cols.solver.functionals.size() == 3);
  CHECK(with_cols.solver.functionals[0].column_name() == "m4");
  CHECK(with_cols.solver.functionals[1].column_name() == "M0_2");
  CHECK(with_cols.solver.functionals[2].column_name() == "D2_2");
}

TEST_CASE("config lists expand and plain configs stay single") {
  const fs::path dir = fresh_dir("cfglist");
  {
    std::ofstream plain(dir / "one.json");
    plain << R"({"schema_version":1,"scenario":"run"})";
  }
  {
    std::ofstream list(dir / "many.json");
    list << R"({"configs":[
      {"schema_version":1,"scenario":"run","seed":11},
      {"schema_version":1,"scenario":"lorentz-selftest","seed":12}
    ]})";
  }
  CHECK(load_config_list((dir / "one.json").string()).size() == 1);
  const auto many = load_config_list((dir / "many.json").string());
  REQUIRE(many.size() == 2);
  CHECK(many[0].seed == 11);
  CHECK(many[1].scenario == "lorentz-selftest");
}

TEST_CASE("build_initial lands every recipe on the reference moments") {
  const GridSpec g = make_grid(3, 16, 5.0);
  for (const char* kind : {"bimodal", "gaussian", "shell", "spike_with_bath", "compact_bump"}) {
    InitialSpec spec;
    spec.kind = kind;
    spec.sigma = 0.8;
    const ScalarField f = build_initial(g, spec);
    const auto res = normalization_residual(f);
    CHECK_MESSAGE(std::abs(res[0]) < 1e-10, kind);
    CHECK_MESSAGE(std::abs(res[1]) < 1e-10, kind);
    CHECK_MESSAGE(std::abs(res[2]) < 1e-10, kind);
  }

  // an already-normalized Maxwellian passes through with exact cell values
  InitialSpec mspec;
  const ScalarField M = build_initial(g, mspec);
  const ScalarField M0 = fields::maxwellian(g);
  double gap = 0.0;
  for (std::int64_t id = 0; id < g.cells; ++id)
    gap = std::max(gap, std::abs(M.v[id] - M0.v[id]));
  CHECK(gap == 0.0);

  InitialSpec ladder;
  ladder.kind = "shell_ladder";
  ladder.radii = {0.0, 1.5};
  ladder.widths = {1.0, 0.8};
  ladder.heights = {1.0, 0.25};
  const ScalarField lf = build_initial(g, ladder);
  CHECK(std::abs(normalization_residual(lf)[0]) < 1e-10);

  InitialSpec bad;
  bad.kind = "vortex";
  CHECK_THROWS(build_initial(g, bad));
}

TEST_CASE("diagnostics CSV: exact column contract and 17-digit round-trip") {
  const GridSpec g = make_grid(3, 12, 4.0);
  ScalarField f0 = normalize_initial(fields::bimodal(g, 1.5, 0.9));
  KernelSet ks(g, -1.0);
  SolverConfig cfg;
  cfg.t_end = 0.01;
  cfg.snapshot_interval = 0.005;
  FunctionalRequest m4{FunctionalRequest::Kind::Moment, 4.0, 2.0};
  FunctionalRequest M02{FunctionalRequest::Kind::LpMoment, 0.0, 2.0};
  FunctionalRequest D22{FunctionalRequest::Kind::Dissipation, 2.0, 2.0};
  cfg.functionals = {m4, M02, D22};
  const Trajectory traj = run(f0, ks, cfg);

  const fs::path dir = fresh_dir("csv");
  write_diagnostics_csv((dir / "diag.csv").string(), traj, cfg);
  std::ifstream in(dir / "diag.csv");
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "time,dt,mass,mom_x,mom_y,mom_z,energy,entropy,k0,m4,M0_2,D2_2");

  std::string line;
  std::size_t rows = 0;
  std::string first;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (rows == 0) first = line;
    CHECK(split(line, ',').size() == 12);
    ++rows;
  }
  CHECK(rows == traj.rows.size());

  // %.17g columns reproduce the stored doubles bit-for-bit
  const auto cells = split(first, ',');
  REQUIRE(cells.size() == 12);
  CHECK(std::strtod(cells[0].c_str(), nullptr) == traj.rows[0].time);
  CHECK(std::strtod(cells[2].c_str(), nullptr) == traj.rows[0].mass);
  CHECK(std::strtod(cells[7].c_str(), nullptr) == traj.rows[0].entropy_val);
  CHECK(std::strtod(cells[9].c_str(), nullptr) == traj.rows[0].extra[0]);
  CHECK(std::strtod(cells[11].c_str(), nullptr) == traj.rows[0].extra[2]);
}

TEST_CASE("diagnostics CSV: planar grids drop the third momentum column") {
  Trajectory traj;
  traj.grid = make_grid(2, 8, 3.0);
  DiagnosticsRow row;
  row.time = 0.25;
  row.mass = 1.0;
  traj.rows.push_back(row);
  SolverConfig cfg;
  const fs::path dir = fresh_dir("csv2d");
  write_diagnostics_csv((dir / "diag.csv").string(), traj, cfg);
  std::ifstream in(dir / "diag.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "time,dt,mass,mom_x,mom_y,energy,entropy,k0");
}

TEST_CASE("appearance-rate fit recovers an exact power law and declines flat data") {
  SolverConfig cfg;
  FunctionalRequest M02{FunctionalRequest::Kind::LpMoment, 0.0, 2.0};
  cfg.functionals = {M02};

  Trajectory traj;
  traj.grid = make_grid(3, 8, 3.0);
  for (int k = 0; k <= 80; ++k) {
    DiagnosticsRow row;
    row.time = 0.01 * k;
    row.extra = {k == 0 ? 1e9 : std::pow(row.time, -1.5)};
    traj.rows.push_back(row);
  }
  const RateFit fit = fit_appearance_rate(traj, cfg, 0.0, 2.0);
  CHECK(fit.target == doctest::Approx(-1.5));
  REQUIRE(fit.fitted);
  CHECK(fit.slope == doctest::Approx(-1.5).epsilon(1e-9));
  CHECK(fit.pass);
  CHECK(fit.t_lo > 0.0);
  CHECK(fit.t_hi > fit.t_lo);

  Trajectory flat;
  flat.grid = traj.grid;
  for (int k = 0; k <= 80; ++k) {
    DiagnosticsRow row;
    row.time = 0.01 * k;
    row.extra = {2.0};
    flat.rows.push_back(row);
  }
  const RateFit declined = fit_appearance_rate(flat, cfg, 0.0, 2.0);
  CHECK_FALSE(declined.fitted);
  CHECK_FALSE(declined.pass);
  CHECK_FALSE(declined.note.empty());

  // asking for a column that was never recorded is an error
  CHECK_THROWS(fit_appearance_rate(traj, cfg, 2.0, 2.0));
}

TEST_CASE("moment-growth fit accepts a linear envelope and flags excursions") {
  SolverConfig cfg;
  FunctionalRequest m4{FunctionalRequest::Kind::Moment, 4.0, 2.0};
  cfg.functionals = {m4};

  Trajectory traj;
  traj.grid = make_grid(3, 8, 3.0);
  for (int k = 0; k <= 40; ++k) {
    DiagnosticsRow row;
    row.time = 0.025 * k;
    row.extra = {7.0 + 0.5 * row.time};
    traj.rows.push_back(row);
  }
  const RateFit ok = fit_moment_growth(traj, cfg, 4.0, 0.05);
  REQUIRE(ok.fitted);
  CHECK(ok.pass);
  CHECK(ok.slope == doctest::Approx(0.5).epsilon(1e-9));

  Trajectory spiky = traj;
  spiky.rows[20].extra[0] += 0.2 * spiky.rows.back().extra[0];  // 20% of max above the line
  const RateFit flagged = fit_moment_growth(spiky, cfg, 4.0, 0.05);
  REQUIRE(flagged.fitted);
  CHECK_FALSE(flagged.pass);
}

TEST_CASE("lorentz self-test passes on seeded random fields") {
  const LorentzSelfTest rep = lorentz_selftest(10, 7);
  CHECK(rep.fields_checked == 20);  // two fields per Hoelder/interpolation round
  CHECK(rep.pass);
  CHECK(rep.equimeasurability_gap == 0.0);
  CHECK(rep.pp_vs_lp_gap < 1e-10);
  CHECK(rep.norm_identity_gap < 1e-10);
  CHECK(rep.indicator_gap < 1e-10);
  CHECK(rep.max_holder_ratio <= 1.0 + 1e-12);
  CHECK(rep.max_interpolation_ratio <= 1.0 + 1e-12);
}

TEST_CASE("lorentz-selftest scenario writes its per-check CSV") {
  const fs::path dir = fresh_dir("lorentz_scenario");
  std::ostringstream cfgs;
  cfgs << R"({"schema_version":1,"scenario":"lorentz-selftest","out_dir":")"
       << (dir / "out").string() << R"(","lorentz":{"field_count":4,"seed":3}})";
  const std::vector<ExperimentConfig> list = {parse_config(cfgs.str())};
  CHECK(run_scenarios(list) == 0);
  const std::string csv = slurp(dir / "out" / "selftest.csv");
  CHECK(csv.rfind("check,value,bound,pass\n", 0) == 0);
  CHECK(csv.find("sobolev_spread,") != std::string::npos);
  // every reported check passed
  CHECK(csv.find(",0\n") == std::string::npos);
  CHECK(fs::exists(dir / "out" / "report.json"));
}

TEST_CASE("run scenario writes artifacts and conservation gates the exit code") {
  const fs::path dir = fresh_dir("scenario");
  std::ostringstream cfgs;
  cfgs << R"({"schema_version":1,"scenario":"conservation",
    "grid":{"d":3,"n":12,"half_width":4.0},
    "gamma":-1.0,
    "out_dir":")"
       << (dir / "pass").string() << R"(",
    "initial":{"kind":"bimodal","separation":1.5,"sigma":0.9},
    "solver":{"t_end":0.02,"snapshot_interval":0.004}})";
  ExperimentConfig cfg = parse_config(cfgs.str());
  CHECK(run_scenario(cfg) == 0);
  CHECK(fs::exists(dir / "pass" / "diagnostics.csv"));
  CHECK(fs::exists(dir / "pass" / "report.json"));
  CHECK(fs::exists(dir / "pass" / "snap_000000.bin"));

  // impossible tolerances force the failure exit code (2), not an exception
  ExperimentConfig strict = cfg;
  strict.out_dir = (dir / "fail").string();
  strict.tolerances.mass = 1e-300;
  strict.tolerances.momentum = 1e-300;
  strict.tolerances.energy = 1e-300;
  CHECK(run_scenario(strict) == 2);
  const std::string rep = slurp(dir / "fail" / "report.json");
  CHECK(rep.find("\"pass\": false") != std::string::npos);
}

TEST_CASE("checkpointed runs resume bit-exactly") {
  const fs::path dir = fresh_dir("restart");
  std::ostringstream base;
  base << R"({"schema_version":1,"scenario":"run",
    "grid":{"d":3,"n":12,"half_width":4.0},
    "gamma":-1.0,
    "out_dir":")"
       << (dir / "full").string() << R"(",
    "initial":{"kind":"bimodal","separation":1.5,"sigma":0.9},
    "checkpoint_every":2,
    "solver":{"t_end":0.04,"snapshot_interval":0.004}})";
  const ExperimentConfig full = parse_config(base.str());
  REQUIRE(run_scenario(full) == 0);

  // find a mid-run checkpoint directory
  fs::path ckpt;
  for (const auto& e : fs::directory_iterator(dir / "full"))
    if (e.is_directory() && e.path().filename().string().rfind("checkpoint_", 0) == 0)
      if (ckpt.empty() || e.path().filename() < ckpt.filename()) ckpt = e.path();
  REQUIRE_FALSE(ckpt.empty());

  ExperimentConfig resumed = full;
  resumed.out_dir = (dir / "resumed").string();
  resumed.restart_from = ckpt.string();
  REQUIRE(run_scenario(resumed) == 0);

  // the stitched diagnostics must be byte-identical to the uninterrupted run
  CHECK(slurp(dir / "resumed" / "diagnostics.csv") == slurp(dir / "full" / "diagnostics.csv"));

  // every snapshot the resumed run wrote must match the full run's bytes
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(dir / "resumed")) {
    const std::string name = e.path().filename().string();
    if (name.rfind("snap_", 0) != 0) continue;
    CHECK_MESSAGE(slurp(e.path()) == slurp(dir / "full" / name), name);
    ++compared;
  }
  CHECK(compared >= 2);

  // a mismatched grid is rejected up front
  ExperimentConfig wrong = resumed;
  wrong.n = 16;
  wrong.out_dir = (dir / "wrong").string();
  CHECK_THROWS(run_scenario(wrong));
}
