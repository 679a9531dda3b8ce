// Reproducible Monte Carlo trial engine.
//
// Trial i draws everything it needs (hypothesis, then noise) from the stream
// keyed by (master_seed, i), so estimates do not depend on how trials are
// sharded across worker threads.
#ifndef ADVGLRT_MONTECARLO_HPP
#define ADVGLRT_MONTECARLO_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "advglrt/attacks.hpp"
#include "advglrt/detectors.hpp"
#include "advglrt/model.hpp"

namespace advglrt {

struct ErrorEstimate {
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;
  std::uint64_t ties = 0;
  std::uint64_t seed = 0;

  /// Half-width of the 95% normal-approximation interval (before clipping).
  double half_width() const;
};

/// p_hat +- 1.96 sqrt(p_hat (1 - p_hat) / n), clipped to [0, 1].
ErrorEstimate make_error_estimate(std::uint64_t errors, std::uint64_t ties,
                                  std::uint64_t trials, std::uint64_t seed);

struct TrialOptions {
  std::uint64_t n_trials = 10000;
  std::uint64_t master_seed = 1;
  /// Worker threads; affects speed only.
  unsigned threads = 1;
  bool allow_over_budget = false;
};

/// Runs every detector on the same trials (common random numbers). The
/// hypothesis is drawn uniformly unless `fixed_hypothesis` is set.
std::vector<ErrorEstimate> run_trials(const ProblemInstance& instance,
                                      const AttackSpec& attack,
                                      std::span<const Detector> detectors,
                                      const TrialOptions& options,
                                      std::optional<int> fixed_hypothesis = std::nullopt);

ErrorEstimate run_trials(const ProblemInstance& instance, const AttackSpec& attack,
                         const Detector& detector, const TrialOptions& options);

ErrorEstimate run_conditional_trials(const ProblemInstance& instance, int hypothesis,
                                     const AttackSpec& attack, const Detector& detector,
                                     const TrialOptions& options);

/// Streaming mean, variance and fourth central moment; mergeable.
class RunningMoments {
 public:
  void add(double x);
  void merge(const RunningMoments& other);

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Population variance.
  double variance() const;
  double mean_standard_error() const;
  /// Large-sample standard error of variance().
  double variance_standard_error() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

/// One shared-noise draw of the cost difference C and bound variable Y.
struct CostSample {
  double cost_difference = 0.0;
  double bound = 0.0;
};

struct CoordinateCostParams {
  double abs_mu = 0.0;
  double eps_des = 1.0;
  double eps_act = 1.0;
  double sigma = 1.0;

  /// t = 2(|mu| - eps_des) of the bound variable, rounded the same way as
  /// the cost difference's offset.
  double t() const { return (2.0 * abs_mu - eps_des) - eps_des; }
};

/// C = g(2|mu| - eps_act + n)^2 - g(n - eps_act)^2 and
/// Y = 1{n >= -t}(t + n)^2 - n^2 for one noise value n.
CostSample coordinate_cost_sample(const CoordinateCostParams& params, double noise);

/// Draws n shared-noise (C, Y) pairs; draw j comes from stream
/// (seed, j / kCostChunk), so the sequence is fixed by (seed, n).
std::vector<CostSample> sample_coordinate_costs(const CoordinateCostParams& params,
                                                std::uint64_t n, std::uint64_t seed);

inline constexpr std::uint64_t kCostChunk = 1u << 16;

struct CoordinateCostSummary {
  RunningMoments cost_difference;
  RunningMoments bound;
  /// Draws with C < Y.
  std::uint64_t bound_violations = 0;
};

/// Streaming version of sample_coordinate_costs for large n.
CoordinateCostSummary summarize_coordinate_costs(const CoordinateCostParams& params,
                                                 std::uint64_t n, std::uint64_t seed,
                                                 unsigned threads = 1);

/// Empirical moments of Y = 1{N >= -t}(t + N)^2 - N^2 alone, for any t.
RunningMoments summarize_bound_variable(double t, double sigma, std::uint64_t n,
                                        std::uint64_t seed, unsigned threads = 1);

}  // namespace advglrt

#endif  // ADVGLRT_MONTECARLO_HPP
