#include "advglrt/detectors.hpp"

#include <string>

namespace advglrt {

namespace {

void check_dims(const Vector& x, const std::vector<Vector>& means) {
  if (means.size() < 2) throw std::invalid_argument("GLRT needs at least two hypotheses");
  for (const auto& m : means) {
    if (m.size() != x.size()) throw std::invalid_argument("GLRT: dimension mismatch");
  }
}

int argmin_with_tie(const Vector& costs, bool* tie) {
  const double best = costs.minCoeff();
  int chosen = -1;
  int count = 0;
  for (Eigen::Index k = 0; k < costs.size(); ++k) {
    if (costs(k) - best <= kTieTolerance) {
      if (chosen < 0) chosen = static_cast<int>(k);
      ++count;
    }
  }
  if (tie) *tie = count > 1;
  return chosen;
}

}  // namespace

Vector glrt_costs(const Vector& x, const std::vector<Vector>& means, double eps) {
  require_budget(eps);
  check_dims(x, means);
  Vector costs(static_cast<Eigen::Index>(means.size()));
  for (std::size_t k = 0; k < means.size(); ++k) {
    costs(static_cast<Eigen::Index>(k)) = glrt_cost(x, means[k], eps);
  }
  return costs;
}

Decision glrt_decide(const Vector& x, const std::vector<Vector>& means, double eps) {
  Decision decision;
  decision.costs_or_statistic = glrt_costs(x, means, eps);
  decision.chosen = argmin_with_tie(decision.costs_or_statistic, &decision.tie);
  return decision;
}

LinearDetector clean_weights(const Vector& mu) { return {mu}; }

LinearDetector minimax_weights(const Vector& mu, double eps) {
  require_budget(eps);
  return {soft_threshold(mu, eps)};
}

Decision linear_decide(const Vector& x, const LinearDetector& w) {
  if (x.size() != w.weights.size()) {
    throw std::invalid_argument("linear_decide: dimension mismatch");
  }
  const double statistic = w.weights.dot(x);
  Decision decision;
  decision.costs_or_statistic = Vector::Constant(1, statistic);
  decision.chosen = statistic < 0.0 ? 1 : 0;
  decision.tie = statistic == 0.0;
  return decision;
}

std::string_view to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::clean: return "clean";
    case DetectorKind::minimax: return "minimax";
    case DetectorKind::glrt: return "glrt";
  }
  return "glrt";
}

DetectorKind detector_kind_from_string(std::string_view name) {
  if (name == "clean") return DetectorKind::clean;
  if (name == "minimax") return DetectorKind::minimax;
  if (name == "glrt") return DetectorKind::glrt;
  throw std::invalid_argument("unknown detector '" + std::string(name) + "'");
}

Detector::Detector(DetectorKind kind, const ProblemInstance& instance)
    : kind_(kind), means_(instance.means()), eps_des_(instance.eps_des()) {
  if (kind_ == DetectorKind::glrt) return;
  if (!instance.is_binary_symmetric()) {
    throw std::invalid_argument(std::string(to_string(kind_)) +
                                " detector needs a binary symmetric instance");
  }
  linear_ = kind_ == DetectorKind::clean ? clean_weights(instance.mean(0))
                                         : minimax_weights(instance.mean(0), eps_des_);
}

bool Detector::degenerate() const {
  return kind_ != DetectorKind::glrt && linear_.degenerate();
}

Decision Detector::decide(const Vector& x) const {
  if (kind_ == DetectorKind::glrt) return glrt_decide(x, means_, eps_des_);
  return linear_decide(x, linear_);
}

int Detector::choose(const Vector& x, bool* tie) const {
  if (kind_ != DetectorKind::glrt) {
    const double statistic = linear_.weights.dot(x);
    *tie = statistic == 0.0;
    return statistic < 0.0 ? 1 : 0;
  }
  if (means_.size() == 2) {
    const double c0 = glrt_cost(x, means_[0], eps_des_);
    const double c1 = glrt_cost(x, means_[1], eps_des_);
    *tie = std::abs(c0 - c1) <= kTieTolerance;
    return (*tie || c0 < c1) ? 0 : 1;
  }
  Vector costs(static_cast<Eigen::Index>(means_.size()));
  for (std::size_t k = 0; k < means_.size(); ++k) {
    costs(static_cast<Eigen::Index>(k)) = glrt_cost(x, means_[k], eps_des_);
  }
  return argmin_with_tie(costs, tie);
}

}  // namespace advglrt
