#include <filesystem>
#include <fstream>
#include <sstream>

#include "advglrt/experiment.hpp"
#include "doctest.h"

using namespace advglrt;

namespace {

const std::filesystem::path kTestDir = ADVGLRT_TEST_DIR;
const std::filesystem::path kConfigDir = ADVGLRT_CONFIG_DIR;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_for(const ExperimentConfig& config, const RunOptions& options) {
  std::ostringstream out;
  write_experiment_csv(config, options, out);
  return out.str();
}

int error_line(const std::string& text) {
  try {
    check_config(parse_config_text(text));
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

const char* kSmall = R"(experiment_id = small
mu = 3, 1
eps_des = 1
sigma_grid = 0.5, 1
k_grid = 0, 1
detectors = glrt, minimax, clean
n_trials = 2000
master_seed = 9
)";

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config_text(kSmall);
  CHECK(c.experiment_id == "small");
  CHECK(c.mu == std::vector<double>{3.0, 1.0});
  CHECK(c.sigma_grid == std::vector<double>{0.5, 1.0});
  CHECK(c.detectors.size() == 3);
  CHECK(c.master_seed == 9);
  CHECK(c.mode == ExperimentMode::sweep);
  CHECK_NOTHROW(check_config(c));
}

TEST_CASE("config round trip") {
  for (const char* name : {"fig1.cfg", "fig2.cfg", "fig3.cfg"}) {
    ExperimentConfig c = load_config(kConfigDir / name);
    c.base_dir.clear();
    CHECK(parse_config_text(serialize_config(c)) == c);
  }
  ExperimentConfig c = parse_config_text(kSmall);
  CHECK(parse_config_text(serialize_config(c)) == c);
  const std::string once = serialize_config(c);
  CHECK(serialize_config(parse_config_text(once)) == once);

  ExperimentConfig other = c;
  other.output = "somewhere.csv";
  CHECK(config_hash(other) == config_hash(c));
  other.master_seed = 10;
  CHECK(config_hash(other) != config_hash(c));
}

TEST_CASE("config errors carry line numbers") {
  CHECK(error_line("experiment_id = x\nbogus = 1\n") == 2);
  CHECK(error_line("mu = 1, 1\nmu = 2, 2\n") == 2);
  CHECK(error_line("# comment\n\nsigma_grid = 1, abc\n") == 3);
  CHECK(error_line("no equals sign\n") == 1);
  CHECK(error_line("n_trials = -4\n") == 1);
  CHECK_THROWS_WITH_AS(load_config(kTestDir / "data" / "no_such.cfg"),
                       doctest::Contains("no_such.cfg"), ConfigError);
}

TEST_CASE("semantic config checks") {
  const std::string base = "mu = 1, 1\neps_des = 1\nmaster_seed = 1\ndetectors = glrt\n";
  CHECK_NOTHROW(check_config(parse_config_text(base + "sigma_grid = 1\neps_act_grid = 0.5\n")));
  // Noise axis must be given exactly once.
  CHECK_THROWS_AS(check_config(parse_config_text(base + "eps_act_grid = 0.5\n")), ConfigError);
  CHECK_THROWS_AS(check_config(parse_config_text(
                      base + "sigma_grid = 1\ndesign_snr_grid = 1\neps_act_grid = 0.5\n")),
                  ConfigError);
  // Over budget without the stress flag.
  const std::string over = slurp(kTestDir / "data" / "over_budget.cfg");
  CHECK_THROWS_AS(check_config(parse_config_text(over)), ConfigError);
  CHECK_NOTHROW(check_config(parse_config_text(over + "stress_over_budget = true\n")));
  // Empty detector list.
  CHECK_THROWS_WITH_AS(check_config(load_config(kTestDir / "data" / "no_detectors.cfg")),
                       doctest::Contains("detectors"), ConfigError);
  // Template and explicit mu together.
  CHECK_THROWS_AS(check_config(parse_config_text(
                      base + "sigma_grid = 1\neps_act_grid = 0.5\nd = 4\np = 0.5\na = 2\nb = 0.5\n")),
                  ConfigError);
  // master_seed is mandatory.
  CHECK_THROWS_AS(check_config(parse_config_text(
                      "mu = 1, 1\nsigma_grid = 1\neps_act_grid = 0\ndetectors = glrt\n")),
                  ConfigError);
}

TEST_CASE("validation report") {
  ExperimentConfig c = parse_config_text(kSmall);
  const ValidationReport ok = validate_config(c);
  CHECK(ok.ok);
  REQUIRE(ok.vulnerability_threshold);
  CHECK(*ok.vulnerability_threshold == 2.5);
  std::ostringstream out;
  print_report(ok, out);
  CHECK(out.str().find("ok") != std::string::npos);
  CHECK(out.str().find("2.5") != std::string::npos);

  c.detectors.clear();
  const ValidationReport bad = validate_config(c);
  CHECK_FALSE(bad.ok);
  std::ostringstream bad_out;
  print_report(bad, bad_out);
  CHECK(bad_out.str().find("invalid") != std::string::npos);
}

TEST_CASE("resolved grids") {
  const ExperimentConfig fig3 = load_config(kConfigDir / "fig3.cfg");
  const auto sigmas = resolve_sigmas(fig3);
  REQUIRE(sigmas.size() == fig3.design_snr_grid.size());
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    CHECK(std::pow(fig3.eps_des / sigmas[i], 2) ==
          doctest::Approx(fig3.design_snr_grid[i]).epsilon(1e-14));
  }
  const ExperimentConfig fig2 = load_config(kConfigDir / "fig2.cfg");
  const Vector mu = resolve_signal(fig2);
  CHECK(mu.size() == 20);
  CHECK((mu.array() > 1.0).count() == 2);
  const auto strengths = resolve_attack_strengths(fig2);
  CHECK(strengths.size() == 11);
  CHECK(strengths.back() == 1.0);
}

TEST_CASE("sweep rows") {
  const ExperimentConfig c = parse_config_text(kSmall);
  const auto rows = run_sweep(c, {2, true});
  CHECK(rows.size() == 2 * 2 * 3);
  for (const SweepRow& row : rows) {
    REQUIRE(row.pe_mc);
    CHECK(*row.trials == 2000);
    CHECK(*row.ci_low <= *row.pe_mc);
    CHECK(*row.pe_mc <= *row.ci_high);
    if (row.detector == "glrt") {
      CHECK(row.pe_clt);
      CHECK_FALSE(row.pe_closed_form);
      CHECK(row.pe_bound.has_value() == (row.eps_act == row.eps_des));
    } else {
      CHECK(row.pe_closed_form);
      CHECK_FALSE(row.pe_clt);
    }
  }
}

TEST_CASE("degenerate minimax weights are flagged") {
  const auto rows = run_sweep(parse_config_text(R"(mu = 0.5, -0.5
eps_des = 1
sigma_grid = 1
k_grid = 1
detectors = minimax
n_trials = 100
master_seed = 3
)"),
                              {1, true});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].flags.find("zero_weights") != std::string::npos);
  CHECK(*rows[0].pe_closed_form == 0.5);
}

TEST_CASE("predict and run share the analytical columns") {
  const ExperimentConfig c = parse_config_text(kSmall);
  const auto full = run_sweep(c, {1, true});
  const auto analytic = run_sweep(c, {1, false});
  REQUIRE(full.size() == analytic.size());
  for (std::size_t i = 0; i < full.size(); ++i) {
    CHECK(full[i].pe_clt == analytic[i].pe_clt);
    CHECK(full[i].pe_bound == analytic[i].pe_bound);
    CHECK(full[i].pe_closed_form == analytic[i].pe_closed_form);
    CHECK_FALSE(analytic[i].pe_mc);
  }
}

TEST_CASE("golden CSV") {
  const ExperimentConfig c = load_config(kTestDir / "golden" / "small.cfg");
  CHECK(csv_for(c, {1, true}) == slurp(kTestDir / "golden" / "small.csv"));
}

TEST_CASE("CSV bytes do not depend on the thread count") {
  const ExperimentConfig c = parse_config_text(kSmall);
  CHECK(csv_for(c, {1, true}) == csv_for(c, {8, true}));
  ExperimentConfig moments = load_config(kConfigDir / "fig1.cfg");
  moments.n_trials = 100000;
  CHECK(csv_for(moments, {1, true}) == csv_for(moments, {3, true}));
}

TEST_CASE("coordinate moment rows") {
  ExperimentConfig c = load_config(kConfigDir / "fig1.cfg");
  c.n_trials = 200000;
  const auto rows = run_coordinate_moments(c, {2, true});
  REQUIRE(rows.size() == c.t_grid.size());
  for (const MomentRow& row : rows) {
    CHECK(row.y_mean_mc);
    if (row.abs_mu) {
      CHECK(*row.c_mean >= row.y_mean - 1e-12);
      CHECK(std::abs(*row.c_mean_mc - *row.c_mean) < 0.05 * std::max(1.0, std::abs(*row.c_mean)));
    } else {
      // |mu| would be negative: no cost difference for this t.
      CHECK(row.t < -2.0 * row.eps);
      CHECK_FALSE(row.c_mean);
    }
  }
}

TEST_CASE("run writes the output file") {
  const auto path = std::filesystem::temp_directory_path() / "advglrt_run_test.csv";
  run_experiment(load_config(kTestDir / "golden" / "small.cfg"), {1, true}, path);
  CHECK(slurp(path) == slurp(kTestDir / "golden" / "small.csv"));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(run_experiment(parse_config_text(kSmall), {1, true},
                                 "/nonexistent-dir/out.csv"),
                  std::runtime_error);
}

TEST_CASE("format_double is shortest round trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}
