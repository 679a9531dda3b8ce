// l-infinity bounded adversarial perturbations.
#ifndef ADVGLRT_ATTACKS_HPP
#define ADVGLRT_ATTACKS_HPP

#include <filesystem>
#include <optional>
#include <string_view>

#include "advglrt/core_math.hpp"
#include "advglrt/model.hpp"

namespace advglrt {

enum class AttackKind { none, worst_case, explicit_vector };

std::string_view to_string(AttackKind kind);
AttackKind attack_kind_from_string(std::string_view name);

/// What the adversary adds to the observation. For explicit vectors the
/// stored vector is the H_0 perturbation; on a binary symmetric instance
/// H_1 receives its negation, mirroring the sign attack.
struct AttackSpec {
  AttackKind kind = AttackKind::none;
  double eps_act = 0.0;
  std::optional<Vector> vector;

  static AttackSpec none() { return {}; }
  static AttackSpec worst_case(double eps_act) {
    return {AttackKind::worst_case, eps_act, std::nullopt};
  }
  static AttackSpec explicit_vector(Vector e) {
    const double strength = e.size() > 0 ? e.lpNorm<Eigen::Infinity>() : 0.0;
    return {AttackKind::explicit_vector, strength, std::move(e)};
  }

  /// l-infinity norm of the perturbation this spec produces.
  double strength() const;
};

/// -eps*sign(mu) under H_0, +eps*sign(mu) under H_1.
template <typename Derived>
Vector worst_case_attack(const Eigen::MatrixBase<Derived>& mu, double eps_act,
                         int hypothesis) {
  require_budget(eps_act);
  if (hypothesis != 0 && hypothesis != 1) {
    throw std::invalid_argument("worst_case_attack: hypothesis must be 0 or 1");
  }
  const double direction = hypothesis == 0 ? -eps_act : eps_act;
  return direction * sign(mu);
}

/// ||e||_inf <= eps up to 1e-12 absolute slack.
template <typename Derived>
bool validate_attack(const Eigen::MatrixBase<Derived>& e, double eps) {
  if (e.size() == 0) return true;
  if (!e.allFinite()) return false;
  return e.cwiseAbs().maxCoeff() <= eps + 1e-12;
}

/// mu_k + e + noise.
Vector realize_observation(const ProblemInstance& instance, int hypothesis,
                           const Vector& attack, const Vector& noise);

/// Throws std::invalid_argument when the spec is malformed for `instance` or
/// exceeds eps_des without `allow_over_budget`.
void check_attack(const AttackSpec& spec, const ProblemInstance& instance,
                  bool allow_over_budget);

/// The perturbation applied when `hypothesis` is true.
Vector resolve_attack(const AttackSpec& spec, const ProblemInstance& instance,
                      int hypothesis);

/// Reads one real value per line; blank lines and '#' comments are skipped.
Vector load_attack_csv(const std::filesystem::path& path);

}  // namespace advglrt

#endif  // ADVGLRT_ATTACKS_HPP
