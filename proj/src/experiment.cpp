#include "advglrt/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "advglrt/analysis.hpp"
#include "advglrt/montecarlo.hpp"

#ifndef ADVGLRT_VERSION
#define ADVGLRT_VERSION "0.0.0"
#endif

namespace advglrt {

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                  : message),
      line_(line) {}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

namespace {

using KeyLines = std::map<std::string, int>;

constexpr const char* kKeys[] = {
    "experiment_id", "mode",          "d",           "p",           "a",
    "b",             "mu",            "eps_des",     "sigma_grid",  "design_snr_grid",
    "attack",        "eps_act_grid",  "k_grid",      "attack_file", "detectors",
    "t_grid",        "n_trials",      "master_seed", "monte_carlo", "stress_over_budget",
    "output"};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_real(const std::string& text, const std::string& key, int line) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError(key + ": '" + text + "' is not a finite real number", line);
  }
  return value;
}

std::uint64_t parse_count(const std::string& text, const std::string& key, int line) {
  std::uint64_t value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": '" + text + "' is not a non-negative integer", line);
  }
  return value;
}

bool parse_bool(const std::string& text, const std::string& key, int line) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'", line);
}

std::vector<double> parse_reals(const std::string& text, const std::string& key,
                                int line) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_real(item, key, line));
  return out;
}

std::string mode_name(ExperimentMode mode) {
  return mode == ExperimentMode::sweep ? "sweep" : "coordinate_moments";
}

int line_of(const KeyLines* lines, const std::string& key) {
  if (!lines) return 0;
  const auto it = lines->find(key);
  return it == lines->end() ? 0 : it->second;
}

std::string join_reals(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

bool uses_template(const ExperimentConfig& c) { return c.d || c.p || c.a || c.b; }

std::filesystem::path attack_path(const ExperimentConfig& c) {
  std::filesystem::path path(c.attack_file);
  if (path.is_relative() && !c.base_dir.empty()) path = c.base_dir / path;
  return path;
}

void check_impl(const ExperimentConfig& c, const KeyLines* lines) {
  const auto fail = [&](const std::string& key, const std::string& message) {
    throw ConfigError(message, line_of(lines, key));
  };
  if (c.experiment_id.empty() ||
      c.experiment_id.find_first_of(",\n\"") != std::string::npos) {
    fail("experiment_id", "experiment_id must be non-empty without commas or quotes");
  }
  if (!(c.eps_des >= 0.0)) fail("eps_des", "eps_des must be >= 0");
  if (c.n_trials < 1) fail("n_trials", "n_trials must be >= 1");

  if (c.sigma_grid.empty() == c.design_snr_grid.empty()) {
    fail(c.sigma_grid.empty() ? "design_snr_grid" : "sigma_grid",
         "give exactly one of sigma_grid or design_snr_grid");
  }
  for (double s : c.sigma_grid) {
    if (!(s > 0.0)) fail("sigma_grid", "sigma values must be > 0");
  }
  for (double s : c.design_snr_grid) {
    if (!(s > 0.0)) fail("design_snr_grid", "design SNR values must be > 0");
  }
  if (!c.design_snr_grid.empty() && !(c.eps_des > 0.0)) {
    fail("design_snr_grid", "design_snr_grid needs eps_des > 0");
  }

  if (c.mode == ExperimentMode::coordinate_moments) {
    if (c.t_grid.empty()) fail("t_grid", "coordinate_moments mode needs a t_grid");
    return;
  }
  if (!c.t_grid.empty()) fail("t_grid", "t_grid only applies to coordinate_moments mode");

  if (uses_template(c)) {
    if (!c.mu.empty()) fail("mu", "give either mu or the template keys d, p, a, b");
    if (!c.d) fail("p", "template is missing key 'd'");
    if (!c.p) fail("d", "template is missing key 'p'");
    if (!c.a) fail("d", "template is missing key 'a'");
    if (!c.b) fail("d", "template is missing key 'b'");
    if (*c.d < 1) fail("d", "d must be >= 1");
    if (!(*c.p >= 0.0 && *c.p <= 1.0)) fail("p", "p must lie in [0, 1]");
    if (!(*c.a > 0.0)) fail("a", "a must be > 0");
    if (!(*c.b >= 0.0)) fail("b", "b must be >= 0");
    if (!(c.eps_des > 0.0)) fail("eps_des", "the two-level template needs eps_des > 0");
  } else {
    if (c.mu.empty()) fail("mu", "no signal: give mu or the template keys d, p, a, b");
    if (std::all_of(c.mu.begin(), c.mu.end(), [](double v) { return v == 0.0; })) {
      fail("mu", "mu must not be the zero vector");
    }
  }

  if (c.detectors.empty()) fail("detectors", "detector list is empty");

  const double slack = 1e-12;
  switch (c.attack) {
    case AttackKind::worst_case: {
      if (c.eps_act_grid.empty() == c.k_grid.empty()) {
        fail(c.eps_act_grid.empty() ? "k_grid" : "eps_act_grid",
             "give exactly one of eps_act_grid or k_grid for the worst_case attack");
      }
      const std::string key = c.eps_act_grid.empty() ? "k_grid" : "eps_act_grid";
      for (double e : resolve_attack_strengths(c)) {
        if (!(e >= 0.0)) fail(key, "attack strengths must be >= 0");
        if (!c.stress_over_budget && e > c.eps_des + slack) {
          fail(key, "eps_act = " + format_double(e) + " exceeds eps_des = " +
                        format_double(c.eps_des) +
                        " (set stress_over_budget = true to allow it)");
        }
      }
      if (!c.attack_file.empty()) fail("attack_file", "attack_file needs attack = explicit");
      break;
    }
    case AttackKind::none:
    case AttackKind::explicit_vector: {
      if (!c.eps_act_grid.empty() || !c.k_grid.empty()) {
        fail(c.eps_act_grid.empty() ? "k_grid" : "eps_act_grid",
             "attack strength grids only apply to attack = worst_case");
      }
      if (c.attack == AttackKind::none) {
        if (!c.attack_file.empty()) fail("attack_file", "attack_file needs attack = explicit");
        break;
      }
      if (c.attack_file.empty()) fail("attack_file", "attack = explicit needs attack_file");
      Vector e;
      try {
        e = load_attack_csv(attack_path(c));
      } catch (const std::exception& ex) {
        fail("attack_file", ex.what());
      }
      if (e.size() != resolve_signal(c).size()) {
        fail("attack_file", "attack vector has " + std::to_string(e.size()) +
                                " entries, signal has " +
                                std::to_string(resolve_signal(c).size()));
      }
      if (!c.stress_over_budget && !validate_attack(e, c.eps_des)) {
        fail("attack_file", "explicit attack exceeds eps_des in l-infinity norm");
      }
      break;
    }
  }
}

}  // namespace

namespace {

ExperimentConfig parse_impl(std::istream& in, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  c.base_dir = base_dir;
  KeyLines lines;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw ConfigError("unknown key '" + key + "'", line_no);
    }
    if (!lines.emplace(key, line_no).second) {
      throw ConfigError("duplicate key '" + key + "'", line_no);
    }
    try {
      if (key == "experiment_id") {
        c.experiment_id = value;
      } else if (key == "mode") {
        if (value == "sweep") c.mode = ExperimentMode::sweep;
        else if (value == "coordinate_moments") c.mode = ExperimentMode::coordinate_moments;
        else throw ConfigError("mode must be sweep or coordinate_moments", line_no);
      } else if (key == "d") {
        const auto d = parse_count(value, key, line_no);
        if (d > 1u << 24) throw ConfigError("d is too large", line_no);
        c.d = static_cast<int>(d);
      } else if (key == "p") {
        c.p = parse_real(value, key, line_no);
      } else if (key == "a") {
        c.a = parse_real(value, key, line_no);
      } else if (key == "b") {
        c.b = parse_real(value, key, line_no);
      } else if (key == "mu") {
        c.mu = parse_reals(value, key, line_no);
      } else if (key == "eps_des") {
        c.eps_des = parse_real(value, key, line_no);
      } else if (key == "sigma_grid") {
        c.sigma_grid = parse_reals(value, key, line_no);
      } else if (key == "design_snr_grid") {
        c.design_snr_grid = parse_reals(value, key, line_no);
      } else if (key == "attack") {
        c.attack = attack_kind_from_string(value);
      } else if (key == "eps_act_grid") {
        c.eps_act_grid = parse_reals(value, key, line_no);
      } else if (key == "k_grid") {
        c.k_grid = parse_reals(value, key, line_no);
      } else if (key == "attack_file") {
        c.attack_file = value;
      } else if (key == "detectors") {
        for (const auto& name : split_list(value)) {
          c.detectors.push_back(detector_kind_from_string(name));
        }
      } else if (key == "t_grid") {
        c.t_grid = parse_reals(value, key, line_no);
      } else if (key == "n_trials") {
        c.n_trials = parse_count(value, key, line_no);
      } else if (key == "master_seed") {
        c.master_seed = parse_count(value, key, line_no);
      } else if (key == "monte_carlo") {
        c.monte_carlo = parse_bool(value, key, line_no);
      } else if (key == "stress_over_budget") {
        c.stress_over_budget = parse_bool(value, key, line_no);
      } else if (key == "output") {
        c.output = value;
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(key + ": " + ex.what(), line_no);
    }
  }
  if (!lines.count("master_seed")) {
    throw ConfigError("master_seed is required so runs are reproducible");
  }
  check_impl(c, &lines);
  return c;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) { return parse_impl(in, {}); }

ExperimentConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return parse_impl(in, path.parent_path());
  } catch (const ConfigError& ex) {
    throw ConfigError(path.string() + ": " + ex.what());
  }
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "experiment_id = " << c.experiment_id << '\n';
  out << "mode = " << mode_name(c.mode) << '\n';
  if (c.d) out << "d = " << *c.d << '\n';
  if (c.p) out << "p = " << format_double(*c.p) << '\n';
  if (c.a) out << "a = " << format_double(*c.a) << '\n';
  if (c.b) out << "b = " << format_double(*c.b) << '\n';
  if (!c.mu.empty()) out << "mu = " << join_reals(c.mu) << '\n';
  out << "eps_des = " << format_double(c.eps_des) << '\n';
  if (!c.sigma_grid.empty()) out << "sigma_grid = " << join_reals(c.sigma_grid) << '\n';
  if (!c.design_snr_grid.empty()) {
    out << "design_snr_grid = " << join_reals(c.design_snr_grid) << '\n';
  }
  out << "attack = " << to_string(c.attack) << '\n';
  if (!c.eps_act_grid.empty()) out << "eps_act_grid = " << join_reals(c.eps_act_grid) << '\n';
  if (!c.k_grid.empty()) out << "k_grid = " << join_reals(c.k_grid) << '\n';
  if (!c.attack_file.empty()) out << "attack_file = " << c.attack_file << '\n';
  if (!c.detectors.empty()) {
    out << "detectors = ";
    for (std::size_t i = 0; i < c.detectors.size(); ++i) {
      out << (i ? ", " : "") << to_string(c.detectors[i]);
    }
    out << '\n';
  }
  if (!c.t_grid.empty()) out << "t_grid = " << join_reals(c.t_grid) << '\n';
  out << "n_trials = " << c.n_trials << '\n';
  out << "master_seed = " << c.master_seed << '\n';
  out << "monte_carlo = " << (c.monte_carlo ? "true" : "false") << '\n';
  out << "stress_over_budget = " << (c.stress_over_budget ? "true" : "false") << '\n';
  if (!c.output.empty()) out << "output = " << c.output << '\n';
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  ExperimentConfig canonical = config;
  canonical.output.clear();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : serialize_config(canonical)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

void check_config(const ExperimentConfig& config) { check_impl(config, nullptr); }

Vector resolve_signal(const ExperimentConfig& c) {
  if (uses_template(c)) {
    if (!(c.d && c.p && c.a && c.b)) throw ConfigError("incomplete two-level template");
    return build_two_level_template({*c.d, *c.p, *c.a, *c.b, c.eps_des});
  }
  return Eigen::Map<const Vector>(c.mu.data(), static_cast<Eigen::Index>(c.mu.size()));
}

std::vector<double> resolve_sigmas(const ExperimentConfig& c) {
  if (!c.sigma_grid.empty()) return c.sigma_grid;
  std::vector<double> out;
  for (double snr : c.design_snr_grid) out.push_back(c.eps_des / std::sqrt(snr));
  return out;
}

std::vector<double> resolve_attack_strengths(const ExperimentConfig& c) {
  switch (c.attack) {
    case AttackKind::none:
      return {0.0};
    case AttackKind::explicit_vector:
      return {load_attack_csv(attack_path(c)).lpNorm<Eigen::Infinity>()};
    case AttackKind::worst_case:
      break;
  }
  if (!c.eps_act_grid.empty()) return c.eps_act_grid;
  std::vector<double> out;
  for (double k : c.k_grid) out.push_back(k * c.eps_des);
  return out;
}

ValidationReport validate_config(const ExperimentConfig& config) {
  ValidationReport report;
  try {
    check_config(config);
    report.ok = true;
  } catch (const ConfigError& ex) {
    report.messages.push_back(std::string("error: ") + ex.what());
  }
  if (config.mode == ExperimentMode::sweep) {
    try {
      const Vector mu = resolve_signal(config);
      report.vulnerability_threshold = vulnerability_threshold(mu);
      report.messages.push_back("d = " + std::to_string(mu.size()));
      if (uses_template(config) && config.p && config.d) {
        const TwoLevelTemplate t{*config.d, *config.p, config.a.value_or(1.0),
                                 config.b.value_or(0.0), config.eps_des};
        report.messages.push_back("high-level coordinates = " +
                                  std::to_string(t.high_count()) +
                                  " (round-half-up of p*d)");
      }
    } catch (const std::exception&) {
    }
  }
  if (report.ok) {
    std::vector<double> sigmas = resolve_sigmas(config);
    report.messages.push_back("sigma = " + join_reals(sigmas));
    report.messages.push_back("eps_des = " + format_double(config.eps_des));
    if (config.mode == ExperimentMode::sweep) {
      report.messages.push_back("attack = " + std::string(to_string(config.attack)));
      report.messages.push_back("eps_act = " + join_reals(resolve_attack_strengths(config)));
      std::string names;
      for (auto k : config.detectors) names += (names.empty() ? "" : ", ") + std::string(to_string(k));
      report.messages.push_back("detectors = " + names);
    } else {
      report.messages.push_back("t = " + join_reals(config.t_grid));
    }
    report.messages.push_back("n_trials = " + std::to_string(config.n_trials));
    report.messages.push_back("master_seed = " + std::to_string(config.master_seed));
  }
  return report;
}

void print_report(const ValidationReport& report, std::ostream& out) {
  out << (report.ok ? "ok" : "invalid") << '\n';
  for (const auto& m : report.messages) out << "  " << m << '\n';
  if (report.vulnerability_threshold) {
    out << "  vulnerability_threshold = " << format_double(*report.vulnerability_threshold)
        << '\n';
  }
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const RunOptions& options) {
  check_config(config);
  if (config.mode != ExperimentMode::sweep) {
    throw ConfigError("run_sweep needs mode = sweep");
  }
  const Vector mu = resolve_signal(config);
  const bool template_signal = uses_template(config);
  std::optional<Vector> explicit_attack;
  if (config.attack == AttackKind::explicit_vector) {
    explicit_attack = load_attack_csv(attack_path(config));
  }

  std::vector<SweepRow> rows;
  for (double sigma : resolve_sigmas(config)) {
    const ProblemInstance instance = make_binary_instance(mu, sigma, config.eps_des);
    std::vector<Detector> detectors;
    for (auto kind : config.detectors) detectors.emplace_back(kind, instance);

    for (double eps_act : resolve_attack_strengths(config)) {
      AttackSpec attack;
      switch (config.attack) {
        case AttackKind::none: attack = AttackSpec::none(); break;
        case AttackKind::worst_case: attack = AttackSpec::worst_case(eps_act); break;
        case AttackKind::explicit_vector:
          attack = AttackSpec::explicit_vector(*explicit_attack);
          break;
      }
      const Vector attack_h0 = resolve_attack(attack, instance, 0);

      std::vector<ErrorEstimate> estimates;
      if (options.monte_carlo) {
        TrialOptions trial_options;
        trial_options.n_trials = config.n_trials;
        trial_options.master_seed = config.master_seed;
        trial_options.threads = options.threads;
        trial_options.allow_over_budget = config.stress_over_budget;
        estimates = run_trials(instance, attack, detectors, trial_options);
      }

      for (std::size_t j = 0; j < detectors.size(); ++j) {
        const Detector& det = detectors[j];
        SweepRow row;
        row.experiment_id = config.experiment_id;
        row.detector = std::string(to_string(det.kind()));
        row.d = static_cast<int>(mu.size());
        if (template_signal) {
          row.p = config.p;
          row.a = config.a;
          row.b = config.b;
        }
        row.eps_des = config.eps_des;
        row.eps_act = eps_act;
        row.sigma = sigma;
        row.seed = config.master_seed;
        if (options.monte_carlo) {
          const ErrorEstimate& e = estimates[j];
          row.pe_mc = e.p_hat;
          row.ci_low = e.ci_low;
          row.ci_high = e.ci_high;
          row.trials = e.trials;
          row.ties = e.ties;
        }
        switch (det.kind()) {
          case DetectorKind::glrt:
            row.pe_clt = glrt_clt_error(mu, attack_h0, config.eps_des, sigma);
            if (config.attack == AttackKind::worst_case &&
                std::abs(eps_act - config.eps_des) <= 1e-12) {
              row.pe_bound = glrt_bound_error(mu, config.eps_des, sigma);
            }
            break;
          case DetectorKind::clean:
            row.pe_closed_form = linear_error_closed_form(mu, mu, attack_h0, sigma);
            break;
          case DetectorKind::minimax:
            row.pe_closed_form = linear_error_closed_form(
                minimax_weights(mu, config.eps_des).weights, mu, attack_h0, sigma);
            break;
        }
        std::vector<std::string> flags;
        if (det.degenerate()) flags.push_back("zero_weights");
        if (eps_act > config.eps_des + 1e-12) flags.push_back("over_budget");
        for (std::size_t f = 0; f < flags.size(); ++f) {
          row.flags += (f ? ";" : "") + flags[f];
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<MomentRow> run_coordinate_moments(const ExperimentConfig& config,
                                              const RunOptions& options) {
  check_config(config);
  if (config.mode != ExperimentMode::coordinate_moments) {
    throw ConfigError("run_coordinate_moments needs mode = coordinate_moments");
  }
  std::vector<MomentRow> rows;
  const double eps = config.eps_des;
  for (double sigma : resolve_sigmas(config)) {
    for (double t : config.t_grid) {
      MomentRow row;
      row.experiment_id = config.experiment_id;
      row.t = t;
      row.eps = eps;
      row.sigma = sigma;
      row.seed = config.master_seed;
      const CoordinateMoments y = y_moments(t, sigma);
      row.y_mean = y.mean;
      row.y_var = y.variance;
      const double abs_mu = eps + 0.5 * t;
      const bool feasible = abs_mu >= 0.0;
      if (feasible) {
        row.abs_mu = abs_mu;
        const CoordinateMoments c = coordinate_cost_moments(abs_mu, eps, eps, sigma);
        row.c_mean = c.mean;
        row.c_var = c.variance;
      }
      if (options.monte_carlo) {
        row.samples = config.n_trials;
        if (feasible) {
          const auto s = summarize_coordinate_costs({abs_mu, eps, eps, sigma},
                                                    config.n_trials, config.master_seed,
                                                    options.threads);
          row.c_mean_mc = s.cost_difference.mean();
          row.c_var_mc = s.cost_difference.variance();
          row.y_mean_mc = s.bound.mean();
          row.y_var_mc = s.bound.variance();
        } else {
          const auto s = summarize_bound_variable(t, sigma, config.n_trials,
                                                  config.master_seed, options.threads);
          row.y_mean_mc = s.mean();
          row.y_var_mc = s.variance();
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }
std::string cell(const std::optional<std::uint64_t>& v) {
  return v ? std::to_string(*v) : "";
}

void write_metadata(const ExperimentConfig& config, bool monte_carlo, const char* schema,
                    std::ostream& out) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash(config)));
  out << "# schema=" << schema << '\n';
  out << "# tool_version=advglrt " << ADVGLRT_VERSION << '\n';
  out << "# config_hash=" << hash << '\n';
  out << "# experiment_id=" << config.experiment_id << '\n';
  out << "# monte_carlo=" << (monte_carlo ? "true" : "false") << '\n';
  out << "# ci_method=normal-approximation 95% (p_hat +- 1.96*sqrt(p_hat*(1-p_hat)/n))\n";
  out << "# rounding=high-level coordinate count is round-half-up(p*d)\n";
  out << "# analytical=pe_clt and pe_bound are CLT approximations; pe_closed_form is exact\n";
}

}  // namespace

void write_experiment_csv(const ExperimentConfig& config, const RunOptions& options,
                          std::ostream& out) {
  const bool mc = options.monte_carlo && config.monte_carlo;
  RunOptions effective = options;
  effective.monte_carlo = mc;
  if (config.mode == ExperimentMode::sweep) {
    const auto rows = run_sweep(config, effective);
    write_metadata(config, mc, kSweepSchema, out);
    out << "experiment_id,detector,d,p,a,b,eps_des,eps_act,sigma,pe_mc,ci_low,ci_high,"
           "pe_clt,pe_bound,pe_closed_form,trials,ties,seed,flags\n";
    for (const auto& r : rows) {
      out << r.experiment_id << ',' << r.detector << ',' << r.d << ',' << cell(r.p) << ','
          << cell(r.a) << ',' << cell(r.b) << ',' << format_double(r.eps_des) << ','
          << format_double(r.eps_act) << ',' << format_double(r.sigma) << ','
          << cell(r.pe_mc) << ',' << cell(r.ci_low) << ',' << cell(r.ci_high) << ','
          << cell(r.pe_clt) << ',' << cell(r.pe_bound) << ',' << cell(r.pe_closed_form)
          << ',' << cell(r.trials) << ',' << cell(r.ties) << ',' << r.seed << ','
          << r.flags << '\n';
    }
  } else {
    const auto rows = run_coordinate_moments(config, effective);
    write_metadata(config, mc, kMomentsSchema, out);
    out << "experiment_id,t,abs_mu,eps,sigma,c_mean_mc,c_var_mc,c_mean,c_var,y_mean_mc,"
           "y_var_mc,y_mean,y_var,samples,seed\n";
    for (const auto& r : rows) {
      out << r.experiment_id << ',' << format_double(r.t) << ',' << cell(r.abs_mu) << ','
          << format_double(r.eps) << ',' << format_double(r.sigma) << ','
          << cell(r.c_mean_mc) << ',' << cell(r.c_var_mc) << ',' << cell(r.c_mean) << ','
          << cell(r.c_var) << ',' << cell(r.y_mean_mc) << ',' << cell(r.y_var_mc) << ','
          << format_double(r.y_mean) << ',' << format_double(r.y_var) << ','
          << cell(r.samples) << ',' << r.seed << '\n';
    }
  }
}

namespace {

void write_to_path(const ExperimentConfig& config, const RunOptions& options,
                   const std::filesystem::path& output) {
  // Compute first so a failed run leaves no partial file behind.
  std::ostringstream buffer;
  write_experiment_csv(config, options, buffer);
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write output file " + output.string());
  out << buffer.str();
  if (!out) throw std::runtime_error("failed writing " + output.string());
}

}  // namespace

void run_experiment(const ExperimentConfig& config, const RunOptions& options,
                    const std::filesystem::path& output) {
  RunOptions o = options;
  o.monte_carlo = true;
  write_to_path(config, o, output);
}

void predict(const ExperimentConfig& config, const RunOptions& options,
             const std::filesystem::path& output) {
  RunOptions o = options;
  o.monte_carlo = false;
  write_to_path(config, o, output);
}

}  // namespace advglrt
