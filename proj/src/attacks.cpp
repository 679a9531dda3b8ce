#include "advglrt/attacks.hpp"

#include <charconv>
#include <fstream>
#include <string>
#include <vector>

namespace advglrt {

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::none: return "none";
    case AttackKind::worst_case: return "worst_case";
    case AttackKind::explicit_vector: return "explicit";
  }
  return "none";
}

AttackKind attack_kind_from_string(std::string_view name) {
  if (name == "none") return AttackKind::none;
  if (name == "worst_case") return AttackKind::worst_case;
  if (name == "explicit") return AttackKind::explicit_vector;
  throw std::invalid_argument("unknown attack kind '" + std::string(name) + "'");
}

double AttackSpec::strength() const {
  switch (kind) {
    case AttackKind::none: return 0.0;
    case AttackKind::worst_case: return eps_act;
    case AttackKind::explicit_vector:
      return vector && vector->size() > 0 ? vector->lpNorm<Eigen::Infinity>() : 0.0;
  }
  return 0.0;
}

Vector realize_observation(const ProblemInstance& instance, int hypothesis,
                           const Vector& attack, const Vector& noise) {
  const Vector& mean = instance.mean(hypothesis);
  if (attack.size() != mean.size() || noise.size() != mean.size()) {
    throw std::invalid_argument("realize_observation: dimension mismatch");
  }
  return mean + attack + noise;
}

void check_attack(const AttackSpec& spec, const ProblemInstance& instance,
                  bool allow_over_budget) {
  switch (spec.kind) {
    case AttackKind::none:
      return;
    case AttackKind::worst_case:
      require_budget(spec.eps_act);
      if (!instance.is_binary_symmetric()) {
        throw std::invalid_argument(
            "worst-case sign attack needs a binary symmetric instance");
      }
      break;
    case AttackKind::explicit_vector:
      if (!spec.vector || spec.vector->size() != instance.dim()) {
        throw std::invalid_argument("explicit attack vector length must equal d");
      }
      if (!spec.vector->allFinite()) {
        throw std::invalid_argument("explicit attack vector has non-finite entries");
      }
      break;
  }
  if (!allow_over_budget && spec.strength() > instance.eps_des() + 1e-12) {
    throw std::invalid_argument("attack strength exceeds eps_des (set the stress flag "
                                "to allow over-budget attacks)");
  }
}

Vector resolve_attack(const AttackSpec& spec, const ProblemInstance& instance,
                      int hypothesis) {
  switch (spec.kind) {
    case AttackKind::none:
      return Vector::Zero(instance.dim());
    case AttackKind::worst_case:
      return worst_case_attack(instance.mean(0), spec.eps_act, hypothesis);
    case AttackKind::explicit_vector:
      if (hypothesis == 1 && instance.is_binary_symmetric()) return -*spec.vector;
      return *spec.vector;
  }
  return Vector::Zero(instance.dim());
}

Vector load_attack_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open attack file " + path.string());
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r,");
    double value = 0.0;
    const char* begin = line.data() + first;
    const char* end = line.data() + last + 1;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected one real value per line");
    }
    values.push_back(value);
  }
  if (values.empty()) throw std::runtime_error(path.string() + ": no values");
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace advglrt
