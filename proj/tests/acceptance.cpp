// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "advglrt/analysis.hpp"
#include "advglrt/detectors.hpp"
#include "advglrt/experiment.hpp"
#include "advglrt/montecarlo.hpp"

using namespace advglrt;

namespace {

const std::filesystem::path kConfigDir = ADVGLRT_CONFIG_DIR;

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;  // <= 0: no limit
  std::function<Outcome()> body;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Vector random_vector(std::mt19937_64& rng, Eigen::Index d, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(d);
  for (auto& x : v) x = normal(rng);
  return v;
}

Outcome kernel_identities() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> budget(0.0, 2.0);
  double worst_split = 0.0, worst_cost = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vector x = random_vector(rng, 10, 2.0);
    const Vector mu = random_vector(rng, 10, 1.0);
    const double eps = budget(rng);
    const Vector split = soft_threshold(x, eps) + clamp_complement(x, eps);
    worst_split = std::max(worst_split, (split - x).lpNorm<Eigen::Infinity>());
    const double cost = glrt_costs(x, {mu, -mu}, eps)(0);
    const double residual = (x - mu - estimate_perturbation(x, mu, eps)).squaredNorm();
    worst_cost = std::max(worst_cost, std::abs(cost - residual));
  }
  return {worst_split <= 1e-10 && worst_cost <= 1e-10,
          fmt("max |g+f-x| = %.3g, max |cost - residual| = %.3g over 1e4 draws", worst_split,
              worst_cost)};
}

Outcome perturbation_optimality() {
  std::mt19937_64 rng(202);
  const double eps = 0.8;
  std::uniform_real_distribution<double> ball(-eps, eps);
  long violations = 0;
  Vector e(5);
  for (int instance = 0; instance < 100; ++instance) {
    const Vector x = random_vector(rng, 5, 2.0);
    const Vector mu = random_vector(rng, 5, 1.0);
    const Vector best = estimate_perturbation(x, mu, eps);
    const double best_residual = (x - mu - best).squaredNorm();
    violations += best.lpNorm<Eigen::Infinity>() > eps;
    for (int s = 0; s < 100000; ++s) {
      for (auto& v : e) v = ball(rng);
      violations += (x - mu - e).squaredNorm() < best_residual;
    }
  }
  return {violations == 0, fmt("%ld violations over 100 x 1e5 perturbations", violations)};
}

Outcome y_moment_closed_forms() {
  const unsigned threads = worker_count();
  std::uint64_t seed = 303;
  double worst_z = 0.0;
  for (double t : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      const RunningMoments mc = summarize_bound_variable(t, sigma, 10000000, seed++, threads);
      const CoordinateMoments m = y_moments(t, sigma);
      worst_z = std::max({worst_z, std::abs(mc.mean() - m.mean) / mc.mean_standard_error(),
                          std::abs(mc.variance() - m.variance) / mc.variance_standard_error()});
    }
  }
  double worst_rel = 0.0;
  for (double sigma : {0.5, 1.0, 2.0}) {
    const double t = 8.0 * sigma;
    const CoordinateMoments low = y_moments(-t, sigma);
    const CoordinateMoments high = y_moments(t, sigma);
    const double s2 = sigma * sigma;
    worst_rel = std::max({worst_rel, std::abs(low.mean / -s2 - 1.0),
                          std::abs(low.variance / (2.0 * s2 * s2) - 1.0),
                          std::abs(high.mean / (t * t) - 1.0),
                          std::abs(high.variance / (4.0 * t * t * s2) - 1.0)});
  }
  return {worst_z <= 3.0 && worst_rel <= 0.01,
          fmt("max deviation %.2f SE over 15 (t, sigma) points at n = 1e7; "
              "max asymptote relative error %.2g at |t|/sigma = 8",
              worst_z, worst_rel)};
}

Outcome pointwise_bound() {
  std::uint64_t seed = 404, violations = 0, points = 0;
  for (double abs_mu : {0.1, 0.5, 0.9, 1.0, 1.5, 3.0}) {
    for (double eps : {0.1, 0.5, 1.0, 2.0}) {
      for (double sigma : {0.25, 1.0, 4.0}) {
        const auto s = summarize_coordinate_costs({abs_mu, eps, eps, sigma}, 1000000, seed++,
                                                  worker_count());
        violations += s.bound_violations;
        ++points;
      }
    }
  }
  return {violations == 0,
          fmt("%llu violations over %llu grid points x 1e6 draws",
              static_cast<unsigned long long>(violations), static_cast<unsigned long long>(points))};
}

Outcome oracle_chain() {
  const TrialOptions base{1000000, 505, worker_count(), false};
  std::ostringstream detail;
  bool pass = true;
  auto compare = [&](const char* label, const ErrorEstimate& e, double expected) {
    const bool ok = std::abs(e.p_hat - expected) <= e.half_width();
    pass = pass && ok;
    detail << fmt("%s p_hat %.5f vs %.5f (+-%.5f)%s; ", label, e.p_hat, expected, e.half_width(),
                  ok ? "" : " OUTSIDE");
  };

  const ProblemInstance ones = make_binary_instance(Vector::Ones(4), 1.0, 0.0);
  compare("clean mu=1_4 sigma=1",
          run_trials(ones, AttackSpec::none(), Detector(DetectorKind::clean, ones), base),
          q_function(2.0));

  const Vector mu = build_two_level_template({20, 0.3, 1.1, 0.9, 1.0});
  const ProblemInstance wide = make_binary_instance(mu, 2.0, 1.0);
  TrialOptions second = base;
  second.master_seed = 506;
  compare("clean template sigma=2",
          run_trials(wide, AttackSpec::none(), Detector(DetectorKind::clean, wide), second),
          q_function(mu.norm() / 2.0));

  const double snr = snr_minimax(20, 0.3, 1.1, 1.0, 1.0, 1.0);
  const ProblemInstance inst = make_binary_instance(mu, 1.0, 1.0);
  TrialOptions third = base;
  third.master_seed = 507;
  compare("minimax k=1",
          run_trials(inst, AttackSpec::worst_case(1.0), Detector(DetectorKind::minimax, inst),
                     third),
          error_from_snr(snr));
  // The quoted 0.4033 is given to four places; Q(sqrt(0.06)) = 0.403248.
  const bool example = std::abs(snr - 0.06) < 1e-12 && std::abs(error_from_snr(snr) - 0.4033) < 1e-4;
  pass = pass && example;
  detail << fmt("SNR %.4g -> Q %.6f", snr, error_from_snr(snr));
  return {pass, detail.str()};
}

Outcome vulnerability_threshold_check() {
  const Vector mu = build_two_level_template({20, 0.1, 1.1, 0.9, 1.0});
  const double eps = 1.05 * vulnerability_threshold(mu);
  const ProblemInstance inst = make_binary_instance(mu, 1.0, eps);
  const std::uint64_t n = 100000;
  const auto e = run_trials(inst, AttackSpec::worst_case(eps), Detector(DetectorKind::clean, inst),
                            {n, 606, worker_count(), false});
  const double floor = 0.5 - 3.0 * std::sqrt(0.25 / n);
  return {e.p_hat >= floor, fmt("eps = %.4f, p_hat %.5f >= %.5f", eps, e.p_hat, floor)};
}

const SweepRow& find_row(const std::vector<SweepRow>& rows, const std::string& detector,
                         double eps_act, double sigma) {
  for (const auto& r : rows) {
    if (r.detector == detector && std::abs(r.eps_act - eps_act) < 1e-12 &&
        std::abs(r.sigma - sigma) < 1e-12)
      return r;
  }
  throw std::runtime_error("missing sweep row");
}

Outcome fig2_replication() {
  ExperimentConfig config = load_config(kConfigDir / "fig2.cfg");
  config.k_grid = {0.0, 0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  const auto rows = run_sweep(config, {worker_count(), true});

  std::ostringstream detail;
  bool a_ok = true;
  for (double k : {0.0, 0.25, 0.5}) {
    const auto& g = find_row(rows, "glrt", k, 1.0);
    const auto& m = find_row(rows, "minimax", k, 1.0);
    const double joint = (*g.ci_high - *g.ci_low) + (*m.ci_high - *m.ci_low);
    a_ok = a_ok && *m.pe_mc - *g.pe_mc > joint;
  }
  const auto& g1 = find_row(rows, "glrt", 1.0, 1.0);
  const auto& m1 = find_row(rows, "minimax", 1.0, 1.0);
  const double width = (*g1.ci_high - *g1.ci_low) + (*m1.ci_high - *m1.ci_low);
  const bool b_ok = *g1.pe_mc >= *m1.pe_mc - 2.0 * width;

  double worst = 0.0, worst_k = 0.0;
  for (const auto& r : rows) {
    if (r.detector != "glrt") continue;
    const double gap = std::abs(*r.pe_clt - *r.pe_mc);
    if (gap > worst) {
      worst = gap;
      worst_k = r.eps_act;
    }
  }
  const bool c_ok = worst <= 0.01;
  detail << fmt("(a) %s; (b) %s: glrt %.4f vs minimax %.4f at k=1; ", a_ok ? "ok" : "FAIL",
                b_ok ? "ok" : "FAIL", *g1.pe_mc, *m1.pe_mc)
         << fmt("(c) %s: max |clt - mc| = %.4f at eps_act = %.2g", c_ok ? "ok" : "FAIL", worst,
                worst_k);
  return {a_ok && b_ok && c_ok, detail.str()};
}

Outcome fig3_replication() {
  ExperimentConfig config = load_config(kConfigDir / "fig3.cfg");
  config.k_grid.insert(config.k_grid.begin(), 0.0);
  const auto rows = run_sweep(config, {1, false});
  const auto sigmas = resolve_sigmas(config);

  bool a_ok = true;
  int compared = 0;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (config.design_snr_grid[i] > 2.0) continue;
    for (double k : config.k_grid) {
      if (k > 0.5) continue;
      const double g = *find_row(rows, "glrt", k, sigmas[i]).pe_clt;
      const double m = *find_row(rows, "minimax", k, sigmas[i]).pe_closed_form;
      a_ok = a_ok && g < m;
      ++compared;
    }
  }
  const auto at = std::find(config.design_snr_grid.begin(), config.design_snr_grid.end(), 25.0);
  const double sigma25 = sigmas[at - config.design_snr_grid.begin()];
  const double g = *find_row(rows, "glrt", 1.0, sigma25).pe_clt;
  const double m = *find_row(rows, "minimax", 1.0, sigma25).pe_closed_form;
  const double ratio = g / m;
  const bool b_ok = std::abs(ratio - 1.0) <= 0.1;
  return {a_ok && b_ok,
          fmt("(a) %s over %d (k <= 0.5, snr <= 2) points; (b) %s: glrt %.4g / minimax %.4g = "
              "%.3f at k=1, (eps/sigma)^2 = 25",
              a_ok ? "ok" : "FAIL", compared, b_ok ? "ok" : "FAIL", g, m, ratio)};
}

Outcome low_noise_limit() {
  const TwoLevelTemplate spec{20, 0.05, 1.1, 0.9, 1.0};
  const Vector mu = build_two_level_template(spec);
  const ProblemInstance inst = make_binary_instance(mu, 1e-6, 1.0);
  const auto e = run_trials(inst, AttackSpec::worst_case(1.0), Detector(DetectorKind::glrt, inst),
                            {100000, 909, worker_count(), false});
  return {e.errors == 0,
          fmt("%d coordinate(s) above eps_des; %llu errors in 1e5 trials", spec.high_count(),
              static_cast<unsigned long long>(e.errors))};
}

Outcome reproducibility() {
  bool pass = true;
  std::ostringstream detail;
  for (const char* name : {"fig1.cfg", "fig2.cfg"}) {
    ExperimentConfig config = load_config(kConfigDir / name);
    config.n_trials = 100000;
    std::ostringstream one, eight;
    write_experiment_csv(config, {1, true}, one);
    write_experiment_csv(config, {8, true}, eight);
    const bool same = one.str() == eight.str();
    pass = pass && same;
    detail << name << (same ? " identical" : " DIFFERS") << " (" << one.str().size()
           << " bytes); ";
  }
  return {pass, detail.str()};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "kernel identities", 1.0, kernel_identities},
      {2, "perturbation estimate optimality", 10.0, perturbation_optimality},
      {3, "Y-moment closed forms", 30.0, y_moment_closed_forms},
      {4, "pointwise bound C >= Y", 10.0, pointwise_bound},
      {5, "Monte Carlo oracle chain", 90.0, oracle_chain},
      {6, "vulnerability threshold", 0.0, vulnerability_threshold_check},
      {7, "attack-strength sweep (d=20, p=0.1)", 300.0, fig2_replication},
      {8, "predicted-error ordering (d=20, p=0.3)", 60.0, fig3_replication},
      {9, "low-noise limit", 0.0, low_noise_limit},
      {10, "thread-count reproducibility", 0.0, reproducibility},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.body();
    } catch (const std::exception& ex) {
      outcome = {false, std::string("exception: ") + ex.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit_s <= 0.0 || seconds < c.time_limit_s;
    const bool pass = outcome.pass && in_time;
    failures += !pass;
    std::printf("criterion %2d: %s  %s -- %s [%.2f s%s]\n", c.id, pass ? "PASS" : "FAIL",
                c.title.c_str(), outcome.detail.c_str(), seconds,
                in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
