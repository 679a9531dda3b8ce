#include "advglrt/analysis.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace advglrt {

namespace {

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("sigma must be finite and > 0");
  }
}

// Integration window in units of sigma; the Gaussian tail beyond it is
// below 1e-22 of the total mass.
constexpr double kHalfWidth = 10.0;

}  // namespace

CoordinateMoments y_moments(double t, double sigma) {
  require_sigma(sigma);
  const double s2 = sigma * sigma;
  const double t2 = t * t;
  const double q = q_function(-t / sigma);
  const double density_term = sigma * t * std_normal_pdf(t / sigma);
  const double mean = q * (t2 + s2) - s2 + density_term;
  const double second = 3.0 * s2 * s2 + q * (t2 * t2 + 4.0 * t2 * s2 - 3.0 * s2 * s2) +
                        density_term * (t2 + 3.0 * s2);
  return {mean, std::max(0.0, second - mean * mean)};
}

CoordinateMoments cost_difference_moments(double abs_mu, double shift,
                                          double eps_des, double sigma) {
  require_sigma(sigma);
  require_budget(eps_des);
  if (!(abs_mu >= 0.0) || !std::isfinite(shift)) {
    throw std::invalid_argument("cost_difference_moments: need |mu| >= 0 and finite shift");
  }
  const double offset = 2.0 * abs_mu + shift;
  const auto cost = [=](double n) {
    const double wrong = soft_threshold(offset + n, eps_des);
    const double right = soft_threshold(shift + n, eps_des);
    return wrong * wrong - right * right;
  };

  // The integrand is smooth between the dead-zone edges of both terms.
  const double lo = -kHalfWidth * sigma;
  const double hi = kHalfWidth * sigma;
  std::vector<double> cuts{lo, hi};
  for (double edge : {-offset - eps_des, -offset + eps_des, -shift - eps_des,
                      -shift + eps_des}) {
    if (edge > lo && edge < hi) cuts.push_back(edge);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double inv_sigma = 1.0 / sigma;
  const auto weight = [=](double n) { return inv_sigma * std_normal_pdf(n * inv_sigma); };

  // Fixed 61-point Gauss-Kronrod on chunks no wider than sigma: each chunk
  // integrates a polynomial times a Gaussian, so the rule is at machine
  // precision and the Kronrod-Gauss difference is a faithful error estimate.
  using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  double first = 0.0;
  double second = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double length = cuts[i + 1] - cuts[i];
    if (length <= 0.0) continue;
    const int chunks = std::max(1, static_cast<int>(std::ceil(length / sigma)));
    const double step = length / chunks;
    for (int c = 0; c < chunks; ++c) {
      const double a = cuts[i] + c * step;
      const double b = c + 1 == chunks ? cuts[i + 1] : a + step;
      double e1 = 0.0;
      double e2 = 0.0;
      first += Rule::integrate([&](double n) { return cost(n) * weight(n); }, a, b, 0,
                               0.0, &e1);
      second += Rule::integrate(
          [&](double n) {
            const double v = cost(n);
            return v * v * weight(n);
          },
          a, b, 0, 0.0, &e2);
      // Boost reports the error on the [-1, 1] reference interval.
      error += 0.5 * (b - a) * std::max(e1, e2);
    }
  }
  if (error > kQuadratureTolerance * std::max(1.0, std::abs(second))) {
    throw QuadratureError("cost moment quadrature did not converge", error);
  }
  return {first, std::max(0.0, second - first * first)};
}

CoordinateMoments coordinate_cost_moments(double abs_mu, double eps_des,
                                          double eps_act, double sigma) {
  require_budget(eps_act);
  return cost_difference_moments(abs_mu, -eps_act, eps_des, sigma);
}

double clt_error_probability(std::span<const CoordinateMoments> moments) {
  double mean = 0.0;
  double variance = 0.0;
  for (const auto& m : moments) {
    mean += m.mean;
    variance += m.variance;
  }
  if (variance > 0.0) return q_function(mean / std::sqrt(variance));
  if (mean > 0.0) return 0.0;
  if (mean < 0.0) return 1.0;
  return 0.5;
}

double clt_error_upper_bound(std::span<const BoundVariableParams> params) {
  std::vector<CoordinateMoments> moments;
  moments.reserve(params.size());
  for (const auto& p : params) moments.push_back(y_moments(p.t, p.sigma));
  return clt_error_probability(moments);
}

double snr_minimax(double d, double p, double a, double k, double eps_des,
                   double sigma) {
  require_sigma(sigma);
  const double ratio = eps_des / sigma;
  return (a - k) * (a - k) * d * p * ratio * ratio;
}

double snr_glrt(double d, double p, const CoordinateMoments& moments_a,
                const CoordinateMoments& moments_b) {
  const double drift = p * moments_a.mean + (1.0 - p) * moments_b.mean;
  const double spread = p * moments_a.variance + (1.0 - p) * moments_b.variance;
  if (!(spread > 0.0)) throw std::domain_error("snr_glrt: zero total variance");
  return d * drift * drift / spread;
}

double error_from_snr(double snr) { return q_function(std::sqrt(std::max(0.0, snr))); }

double glrt_two_level_error(double d, double p, const CoordinateMoments& moments_a,
                            const CoordinateMoments& moments_b) {
  const double drift = p * moments_a.mean + (1.0 - p) * moments_b.mean;
  const double root = std::sqrt(snr_glrt(d, p, moments_a, moments_b));
  return q_function(drift < 0.0 ? -root : root);
}

double clean_error_closed_form(const Vector& mu, double eps_act, double sigma) {
  require_sigma(sigma);
  const double l2 = mu.norm();
  if (!(l2 > 0.0)) throw std::invalid_argument("clean_error_closed_form: zero mean");
  return q_function((mu.squaredNorm() - eps_act * mu.lpNorm<1>()) / (sigma * l2));
}

double linear_error_closed_form(const Vector& w, const Vector& mu,
                                const Vector& attack_h0, double sigma) {
  require_sigma(sigma);
  if (w.size() != mu.size() || attack_h0.size() != mu.size()) {
    throw std::invalid_argument("linear_error_closed_form: dimension mismatch");
  }
  const double w_norm = w.norm();
  if (w_norm == 0.0) return 0.5;
  return q_function(w.dot(mu + attack_h0) / (sigma * w_norm));
}

std::vector<CoordinateMoments> glrt_coordinate_moments(const Vector& mu,
                                                       const Vector& attack_h0,
                                                       double eps_des, double sigma) {
  if (attack_h0.size() != mu.size()) {
    throw std::invalid_argument("glrt_coordinate_moments: dimension mismatch");
  }
  std::map<std::pair<double, double>, CoordinateMoments> cache;
  std::vector<CoordinateMoments> out;
  out.reserve(static_cast<std::size_t>(mu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu(i) == 0.0) {
      out.push_back({0.0, 0.0});
      continue;
    }
    const std::pair key{std::abs(mu(i)), attack_h0(i) * sign(mu(i))};
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, cost_difference_moments(key.first, key.second, eps_des,
                                                      sigma)).first;
    }
    out.push_back(it->second);
  }
  return out;
}

double glrt_clt_error(const Vector& mu, const Vector& attack_h0, double eps_des,
                      double sigma) {
  return clt_error_probability(glrt_coordinate_moments(mu, attack_h0, eps_des, sigma));
}

double glrt_bound_error(const Vector& mu, double eps, double sigma) {
  std::vector<BoundVariableParams> params;
  params.reserve(static_cast<std::size_t>(mu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    params.push_back({2.0 * (std::abs(mu(i)) - eps), sigma});
  }
  return clt_error_upper_bound(params);
}

}  // namespace advglrt
