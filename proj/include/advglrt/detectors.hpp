// Decision rules: matched filter, minimax linear rule and GLRT.
#ifndef ADVGLRT_DETECTORS_HPP
#define ADVGLRT_DETECTORS_HPP

#include <string_view>
#include <vector>

#include "advglrt/core_math.hpp"
#include "advglrt/model.hpp"

namespace advglrt {

/// Tolerance under which two GLRT costs count as tied.
inline constexpr double kTieTolerance = 1e-12;

struct Decision {
  int chosen = 0;
  /// Per-hypothesis GLRT costs, or the single linear statistic w^T x.
  Vector costs_or_statistic;
  bool tie = false;
};

struct LinearDetector {
  Vector weights;

  bool degenerate() const { return weights.isZero(0.0); }
};

/// Maximum-likelihood perturbation under hypothesis k: the projection of
/// x - mu_k onto the l-infinity ball of radius eps.
template <typename DerivedX, typename DerivedM>
Vector estimate_perturbation(const Eigen::MatrixBase<DerivedX>& x,
                             const Eigen::MatrixBase<DerivedM>& mu_k, double eps) {
  require_budget(eps);
  if (x.size() != mu_k.size()) {
    throw std::invalid_argument("estimate_perturbation: dimension mismatch");
  }
  return clamp_complement(x - mu_k, eps);
}

/// ||g_eps(x - mu_k)||^2 for one hypothesis, without allocating.
template <typename DerivedX, typename DerivedM>
double glrt_cost(const Eigen::MatrixBase<DerivedX>& x,
                 const Eigen::MatrixBase<DerivedM>& mu_k, double eps) {
  double cost = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double r = soft_threshold(x(i) - mu_k(i), eps);
    cost += r * r;
  }
  return cost;
}

/// C_k = ||g_eps(x - mu_k)||^2 for every hypothesis.
Vector glrt_costs(const Vector& x, const std::vector<Vector>& means, double eps);

/// argmin_k C_k with ties (within kTieTolerance) going to the lowest index.
Decision glrt_decide(const Vector& x, const std::vector<Vector>& means, double eps);

/// w = mu.
LinearDetector clean_weights(const Vector& mu);

/// w = g_eps(mu). All-zero when eps >= ||mu||_inf.
LinearDetector minimax_weights(const Vector& mu, double eps);

/// H_0 when w^T x > 0, H_1 when < 0; an exact zero is a tie resolved to H_0.
Decision linear_decide(const Vector& x, const LinearDetector& w);

enum class DetectorKind { clean, minimax, glrt };

std::string_view to_string(DetectorKind kind);
DetectorKind detector_kind_from_string(std::string_view name);

/// A decision rule bound to a problem instance.
class Detector {
 public:
  /// Linear rules need a binary symmetric instance; GLRT accepts any K.
  Detector(DetectorKind kind, const ProblemInstance& instance);

  DetectorKind kind() const { return kind_; }
  /// True for a linear rule whose weights are all zero.
  bool degenerate() const;

  Decision decide(const Vector& x) const;

  /// Chosen index only; the hot path of the Monte Carlo engine.
  int choose(const Vector& x, bool* tie) const;

 private:
  DetectorKind kind_;
  std::vector<Vector> means_;
  double eps_des_;
  LinearDetector linear_;
};

}  // namespace advglrt

#endif  // ADVGLRT_DETECTORS_HPP
