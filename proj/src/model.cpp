#include "advglrt/model.hpp"

#include <string>

namespace advglrt {

ProblemInstance::ProblemInstance(std::vector<Vector> means, double sigma,
                                 double eps_des)
    : means_(std::move(means)), sigma_(sigma), eps_des_(eps_des) {
  if (means_.size() < 2) {
    throw std::invalid_argument("ProblemInstance: need at least two hypotheses");
  }
  const Eigen::Index d = means_.front().size();
  if (d < 1) throw std::invalid_argument("ProblemInstance: dimension must be >= 1");
  for (const auto& m : means_) {
    if (m.size() != d) {
      throw std::invalid_argument("ProblemInstance: mean vectors differ in length");
    }
    if (!m.allFinite()) throw std::invalid_argument("ProblemInstance: non-finite mean");
  }
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw std::invalid_argument("ProblemInstance: sigma must be > 0");
  }
  require_budget(eps_des_);
}

bool ProblemInstance::is_binary_symmetric() const {
  return means_.size() == 2 && means_[0] == -means_[1];
}

ProblemInstance ProblemInstance::with_sigma(double sigma) const {
  return ProblemInstance(means_, sigma, eps_des_);
}

ProblemInstance make_binary_instance(const Vector& mu, double sigma, double eps_des) {
  return ProblemInstance({mu, -mu}, sigma, eps_des);
}

int TwoLevelTemplate::high_count() const {
  return static_cast<int>(std::floor(p * d + 0.5));
}

Vector build_two_level_template(const TwoLevelTemplate& t) {
  if (t.d < 1) throw std::invalid_argument("two-level template: d must be >= 1");
  if (!(t.p >= 0.0 && t.p <= 1.0)) {
    throw std::invalid_argument("two-level template: p must lie in [0, 1]");
  }
  if (!(t.eps_des > 0.0)) {
    throw std::invalid_argument("two-level template: eps_des must be > 0");
  }
  if (!(t.a > 0.0) || !(t.b >= 0.0)) {
    throw std::invalid_argument("two-level template: need a > 0 and b >= 0");
  }
  const int high = t.high_count();
  Vector mu(t.d);
  mu.head(high).setConstant(t.a * t.eps_des);
  mu.tail(t.d - high).setConstant(t.b * t.eps_des);
  return mu;
}

}  // namespace advglrt
