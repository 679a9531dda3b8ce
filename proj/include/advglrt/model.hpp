// Hypothesis-testing problem definitions.
#ifndef ADVGLRT_MODEL_HPP
#define ADVGLRT_MODEL_HPP

#include <vector>

#include "advglrt/core_math.hpp"

namespace advglrt {

/// K-ary Gaussian test H_k: X = mu_k + e + N, N ~ N(0, sigma^2 I), uniform priors.
class ProblemInstance {
 public:
  ProblemInstance(std::vector<Vector> means, double sigma, double eps_des);

  const std::vector<Vector>& means() const { return means_; }
  const Vector& mean(int k) const { return means_.at(static_cast<std::size_t>(k)); }
  int num_hypotheses() const { return static_cast<int>(means_.size()); }
  Eigen::Index dim() const { return means_.front().size(); }
  double sigma() const { return sigma_; }
  double eps_des() const { return eps_des_; }

  /// True when the means are {+mu, -mu}.
  bool is_binary_symmetric() const;

  ProblemInstance with_sigma(double sigma) const;

 private:
  std::vector<Vector> means_;
  double sigma_;
  double eps_des_;
};

/// Binary symmetric instance: H_0 has mean +mu, H_1 has mean -mu.
ProblemInstance make_binary_instance(const Vector& mu, double sigma, double eps_des);

/// Two-level signal: round(p*d) coordinates at a*eps_des, the rest at b*eps_des.
struct TwoLevelTemplate {
  int d = 1;
  double p = 0.0;
  double a = 1.0;
  double b = 0.0;
  double eps_des = 1.0;

  /// Number of coordinates at the high level, round-half-up of p*d.
  int high_count() const;
};

/// Builds the template mean vector, high block first.
Vector build_two_level_template(const TwoLevelTemplate& t);

/// ||mu||_2^2 / ||mu||_1: the smallest sign-attack budget that drives the
/// matched filter to error probability 1/2.
template <typename Derived>
double vulnerability_threshold(const Eigen::MatrixBase<Derived>& mu) {
  const double l1 = mu.template lpNorm<1>();
  if (!(l1 > 0.0)) {
    throw std::invalid_argument("vulnerability_threshold: zero mean vector");
  }
  return mu.squaredNorm() / l1;
}

}  // namespace advglrt

#endif  // ADVGLRT_MODEL_HPP
