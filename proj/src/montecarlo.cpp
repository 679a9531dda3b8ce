#include "advglrt/montecarlo.hpp"

#include <algorithm>
#include <thread>

namespace advglrt {

double ErrorEstimate::half_width() const {
  if (trials == 0) return 0.0;
  return 1.96 * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
}

ErrorEstimate make_error_estimate(std::uint64_t errors, std::uint64_t ties,
                                  std::uint64_t trials, std::uint64_t seed) {
  ErrorEstimate e;
  e.trials = trials;
  e.errors = errors;
  e.ties = ties;
  e.seed = seed;
  e.p_hat = trials ? static_cast<double>(errors) / static_cast<double>(trials) : 0.0;
  const double h = e.half_width();
  e.ci_low = std::max(0.0, e.p_hat - h);
  e.ci_high = std::min(1.0, e.p_hat + h);
  return e;
}

namespace {

struct Counts {
  std::uint64_t errors = 0;
  std::uint64_t ties = 0;
};

// Splits [0, n) into `parts` contiguous ranges and runs `work(begin, end, part)`.
template <typename Work>
void shard(std::uint64_t n, unsigned parts, Work&& work) {
  parts = std::max(1u, parts);
  if (parts == 1 || n < parts) {
    work(std::uint64_t{0}, n, 0u);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(parts);
  for (unsigned p = 0; p < parts; ++p) {
    const std::uint64_t begin = n * p / parts;
    const std::uint64_t end = n * (p + 1) / parts;
    workers.emplace_back([&work, begin, end, p] { work(begin, end, p); });
  }
}

int draw_hypothesis(GaussianSource& source, int k) {
  const int h = static_cast<int>(source.uniform() * k);
  return std::min(h, k - 1);
}

}  // namespace

std::vector<ErrorEstimate> run_trials(const ProblemInstance& instance,
                                      const AttackSpec& attack,
                                      std::span<const Detector> detectors,
                                      const TrialOptions& options,
                                      std::optional<int> fixed_hypothesis) {
  if (options.n_trials < 1) throw std::invalid_argument("run_trials: n_trials must be >= 1");
  check_attack(attack, instance, options.allow_over_budget);
  const int k = instance.num_hypotheses();
  if (fixed_hypothesis && (*fixed_hypothesis < 0 || *fixed_hypothesis >= k)) {
    throw std::invalid_argument("run_trials: hypothesis out of range");
  }

  // Mean plus attack for each hypothesis; the adversary knows the truth.
  std::vector<Vector> shifted;
  for (int h = 0; h < k; ++h) {
    shifted.push_back(instance.mean(h) + resolve_attack(attack, instance, h));
  }

  const unsigned parts =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, options.threads),
                                                    options.n_trials));
  std::vector<std::vector<Counts>> partial(parts, std::vector<Counts>(detectors.size()));
  const double sigma = instance.sigma();
  const Eigen::Index d = instance.dim();

  shard(options.n_trials, parts, [&](std::uint64_t begin, std::uint64_t end, unsigned p) {
    auto& counts = partial[p];
    Vector x(d);
    for (std::uint64_t trial = begin; trial < end; ++trial) {
      GaussianSource source({options.master_seed, trial});
      int truth = draw_hypothesis(source, k);
      if (fixed_hypothesis) truth = *fixed_hypothesis;
      const Vector& base = shifted[static_cast<std::size_t>(truth)];
      for (Eigen::Index i = 0; i < d; ++i) x(i) = base(i) + sigma * source.normal();
      for (std::size_t j = 0; j < detectors.size(); ++j) {
        bool tie = false;
        const int chosen = detectors[j].choose(x, &tie);
        counts[j].errors += chosen != truth;
        counts[j].ties += tie;
      }
    }
  });

  std::vector<ErrorEstimate> out;
  out.reserve(detectors.size());
  for (std::size_t j = 0; j < detectors.size(); ++j) {
    Counts total;
    for (const auto& c : partial) {
      total.errors += c[j].errors;
      total.ties += c[j].ties;
    }
    out.push_back(make_error_estimate(total.errors, total.ties, options.n_trials,
                                      options.master_seed));
  }
  return out;
}

ErrorEstimate run_trials(const ProblemInstance& instance, const AttackSpec& attack,
                         const Detector& detector, const TrialOptions& options) {
  return run_trials(instance, attack, std::span<const Detector>(&detector, 1), options)
      .front();
}

ErrorEstimate run_conditional_trials(const ProblemInstance& instance, int hypothesis,
                                     const AttackSpec& attack, const Detector& detector,
                                     const TrialOptions& options) {
  return run_trials(instance, attack, std::span<const Detector>(&detector, 1), options,
                    hypothesis)
      .front();
}

void RunningMoments::add(double x) {
  const double n1 = static_cast<double>(n_);
  ++n_;
  const double n = static_cast<double>(n_);
  const double delta = x - mean_;
  const double delta_n = delta / n;
  const double delta_n2 = delta_n * delta_n;
  const double term1 = delta * delta_n * n1;
  mean_ += delta_n;
  m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ -
         4.0 * delta_n * m3_;
  m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
  m2_ += term1;
}

void RunningMoments::merge(const RunningMoments& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  const double d2 = delta * delta;
  const double m2 = m2_ + other.m2_ + d2 * na * nb / n;
  const double m3 = m3_ + other.m3_ + d2 * delta * na * nb * (na - nb) / (n * n) +
                    3.0 * delta * (na * other.m2_ - nb * m2_) / n;
  const double m4 = m4_ + other.m4_ +
                    d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                    6.0 * d2 * (na * na * other.m2_ + nb * nb * m2_) / (n * n) +
                    4.0 * delta * (na * other.m3_ - nb * m3_) / n;
  mean_ += delta * nb / n;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
  n_ += other.n_;
}

double RunningMoments::variance() const {
  return n_ ? m2_ / static_cast<double>(n_) : 0.0;
}

double RunningMoments::mean_standard_error() const {
  return n_ ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double RunningMoments::variance_standard_error() const {
  if (n_ == 0) return 0.0;
  const double n = static_cast<double>(n_);
  const double v = variance();
  return std::sqrt(std::max(0.0, m4_ / n - v * v) / n);
}

namespace {

// g(c + n) for the dead zone [-eps, eps], written as offset + n so that the
// wrong-hypothesis term reproduces t + n bit for bit when eps_act == eps_des.
double shifted_soft_threshold(double c, double n, double eps) {
  const double above = (c - eps) + n;
  if (above > 0.0) return above;
  const double below = (c + eps) + n;
  if (below < 0.0) return below;
  return 0.0;
}

}  // namespace

CostSample coordinate_cost_sample(const CoordinateCostParams& params, double noise) {
  const double wrong =
      shifted_soft_threshold(2.0 * params.abs_mu - params.eps_act, noise, params.eps_des);
  const double right = shifted_soft_threshold(-params.eps_act, noise, params.eps_des);
  const double t = params.t();
  const double kept = t + noise >= 0.0 ? (t + noise) * (t + noise) : 0.0;
  return {wrong * wrong - right * right, kept - noise * noise};
}

namespace {

void check_cost_params(const CoordinateCostParams& params, std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("coordinate cost sampling needs n >= 1");
  if (!(params.sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (!(params.abs_mu >= 0.0)) throw std::invalid_argument("|mu| must be >= 0");
  require_budget(params.eps_des);
  require_budget(params.eps_act);
}

// Calls visit(draw_index, noise) for draws [begin, end) of the chunked stream.
template <typename Visit>
void for_each_noise(std::uint64_t seed, double sigma, std::uint64_t begin,
                    std::uint64_t end, Visit&& visit) {
  std::uint64_t j = begin;
  while (j < end) {
    const std::uint64_t chunk = j / kCostChunk;
    const std::uint64_t chunk_end = std::min(end, (chunk + 1) * kCostChunk);
    GaussianSource source({seed, chunk});
    // Draws in a chunk are sequential; skip to the offset if needed.
    for (std::uint64_t skip = chunk * kCostChunk; skip < j; ++skip) source.normal();
    for (; j < chunk_end; ++j) visit(j, sigma * source.normal());
  }
}

// Shards whole chunks across workers and merges per-chunk results in order.
template <typename Result, typename PerChunk, typename Merge>
Result reduce_chunks(std::uint64_t n, unsigned threads, PerChunk&& per_chunk,
                     Merge&& merge) {
  const std::uint64_t chunks = (n + kCostChunk - 1) / kCostChunk;
  std::vector<Result> results(chunks);
  const unsigned parts =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, threads), chunks));
  shard(chunks, parts, [&](std::uint64_t begin, std::uint64_t end, unsigned) {
    for (std::uint64_t c = begin; c < end; ++c) {
      results[c] = per_chunk(c * kCostChunk, std::min(n, (c + 1) * kCostChunk));
    }
  });
  Result total{};
  for (const auto& r : results) merge(total, r);
  return total;
}

}  // namespace

std::vector<CostSample> sample_coordinate_costs(const CoordinateCostParams& params,
                                                std::uint64_t n, std::uint64_t seed) {
  check_cost_params(params, n);
  std::vector<CostSample> out(n);
  for_each_noise(seed, params.sigma, 0, n, [&](std::uint64_t j, double noise) {
    out[j] = coordinate_cost_sample(params, noise);
  });
  return out;
}

CoordinateCostSummary summarize_coordinate_costs(const CoordinateCostParams& params,
                                                 std::uint64_t n, std::uint64_t seed,
                                                 unsigned threads) {
  check_cost_params(params, n);
  return reduce_chunks<CoordinateCostSummary>(
      n, threads,
      [&](std::uint64_t begin, std::uint64_t end) {
        CoordinateCostSummary s;
        for_each_noise(seed, params.sigma, begin, end, [&](std::uint64_t, double noise) {
          const CostSample sample = coordinate_cost_sample(params, noise);
          s.cost_difference.add(sample.cost_difference);
          s.bound.add(sample.bound);
          s.bound_violations += sample.cost_difference < sample.bound;
        });
        return s;
      },
      [](CoordinateCostSummary& total, const CoordinateCostSummary& part) {
        total.cost_difference.merge(part.cost_difference);
        total.bound.merge(part.bound);
        total.bound_violations += part.bound_violations;
      });
}

RunningMoments summarize_bound_variable(double t, double sigma, std::uint64_t n,
                                        std::uint64_t seed, unsigned threads) {
  if (n < 1) throw std::invalid_argument("summarize_bound_variable: n must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  return reduce_chunks<RunningMoments>(
      n, threads,
      [&](std::uint64_t begin, std::uint64_t end) {
        RunningMoments m;
        for_each_noise(seed, sigma, begin, end, [&](std::uint64_t, double noise) {
          const double kept = noise >= -t ? (t + noise) * (t + noise) : 0.0;
          m.add(kept - noise * noise);
        });
        return m;
      },
      [](RunningMoments& total, const RunningMoments& part) { total.merge(part); });
}

}  // namespace advglrt
