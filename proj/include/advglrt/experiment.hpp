// Experiment configuration, sweeps and CSV output.
//
// Config files are flat `key = value` text; lists are comma separated and
// '#' starts a comment. See configs/ for the canned figure replications and
// README.md for the full key list.
#ifndef ADVGLRT_EXPERIMENT_HPP
#define ADVGLRT_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "advglrt/attacks.hpp"
#include "advglrt/detectors.hpp"
#include "advglrt/model.hpp"

namespace advglrt {

inline constexpr const char* kSweepSchema = "advglrt-sweep/1";
inline constexpr const char* kMomentsSchema = "advglrt-coordinate-moments/1";

/// Invalid configuration; `line` is 0 when the problem is not tied to one line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

enum class ExperimentMode { sweep, coordinate_moments };

struct ExperimentConfig {
  std::string experiment_id = "experiment";
  ExperimentMode mode = ExperimentMode::sweep;

  // Signal: either the two-level template (d, p, a, b) or an explicit mu.
  std::optional<int> d;
  std::optional<double> p;
  std::optional<double> a;
  std::optional<double> b;
  std::vector<double> mu;
  double eps_des = 1.0;

  // Noise: sigma values, or design SNR values (eps_des / sigma)^2.
  std::vector<double> sigma_grid;
  std::vector<double> design_snr_grid;

  // Attack strength: absolute values, or fractions k of eps_des.
  AttackKind attack = AttackKind::worst_case;
  std::vector<double> eps_act_grid;
  std::vector<double> k_grid;
  std::string attack_file;

  std::vector<DetectorKind> detectors;
  std::vector<double> t_grid;

  std::uint64_t n_trials = 100000;
  std::uint64_t master_seed = 1;
  bool monte_carlo = true;
  bool stress_over_budget = false;
  std::string output;

  /// Directory used to resolve a relative attack_file.
  std::filesystem::path base_dir;

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// FNV-1a 64 of the canonical text.
std::uint64_t config_hash(const ExperimentConfig& config);

/// Throws ConfigError on the first semantic problem.
void check_config(const ExperimentConfig& config);

struct ValidationReport {
  bool ok = false;
  std::vector<std::string> messages;
  /// ||mu||^2 / ||mu||_1 of the signal, when it could be built.
  std::optional<double> vulnerability_threshold;
};

/// Like check_config but collects the outcome into a printable report with
/// the resolved parameters echoed.
ValidationReport validate_config(const ExperimentConfig& config);
void print_report(const ValidationReport& report, std::ostream& out);

/// Signal vector of a sweep config.
Vector resolve_signal(const ExperimentConfig& config);
std::vector<double> resolve_sigmas(const ExperimentConfig& config);
/// Absolute attack strengths; {0} for no attack, {||e||_inf} for explicit.
std::vector<double> resolve_attack_strengths(const ExperimentConfig& config);

struct SweepRow {
  std::string experiment_id;
  std::string detector;
  int d = 0;
  std::optional<double> p;
  std::optional<double> a;
  std::optional<double> b;
  double eps_des = 0.0;
  double eps_act = 0.0;
  double sigma = 0.0;
  std::optional<double> pe_mc;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::optional<double> pe_clt;
  std::optional<double> pe_bound;
  std::optional<double> pe_closed_form;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> ties;
  std::uint64_t seed = 0;
  std::string flags;
};

struct MomentRow {
  std::string experiment_id;
  double t = 0.0;
  std::optional<double> abs_mu;
  double eps = 0.0;
  double sigma = 0.0;
  std::optional<double> c_mean_mc;
  std::optional<double> c_var_mc;
  std::optional<double> c_mean;
  std::optional<double> c_var;
  std::optional<double> y_mean_mc;
  std::optional<double> y_var_mc;
  double y_mean = 0.0;
  double y_var = 0.0;
  std::optional<std::uint64_t> samples;
  std::uint64_t seed = 0;
};

struct RunOptions {
  unsigned threads = 1;
  /// false gives the analytical-only fast path.
  bool monte_carlo = true;
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const RunOptions& options);
std::vector<MomentRow> run_coordinate_moments(const ExperimentConfig& config,
                                              const RunOptions& options);

/// Runs the config and writes its CSV (metadata header, column row, data).
void write_experiment_csv(const ExperimentConfig& config, const RunOptions& options,
                          std::ostream& out);

/// Runs the config with Monte Carlo enabled unless the config disables it.
void run_experiment(const ExperimentConfig& config, const RunOptions& options,
                    const std::filesystem::path& output);

/// Analytical columns only.
void predict(const ExperimentConfig& config, const RunOptions& options,
             const std::filesystem::path& output);

/// Shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace advglrt

#endif  // ADVGLRT_EXPERIMENT_HPP
