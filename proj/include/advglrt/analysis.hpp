// Analytical error predictors for the binary symmetric test under the
// sign attack: per-coordinate cost-difference moments, the closed-form
// moments of the lower-bounding variable Y, CLT error estimates and the
// effective-SNR formulas for the two-level template.
//
// Everything here is conditioned on H_0 and its attack; by the symmetry of
// the model this is also the prior-averaged error (except for exact ties).
#ifndef ADVGLRT_ANALYSIS_HPP
#define ADVGLRT_ANALYSIS_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "advglrt/core_math.hpp"

namespace advglrt {

struct CoordinateMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// t = 2(|mu| - eps) for one coordinate at noise level sigma.
struct BoundVariableParams {
  double t = 0.0;
  double sigma = 1.0;
};

/// Thrown when adaptive quadrature misses its absolute tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved_tolerance() const { return achieved_; }

 private:
  double achieved_;
};

/// Absolute tolerance of every moment integral.
inline constexpr double kQuadratureTolerance = 1e-10;

/// Mean and variance of Y = 1{N >= -t}(t + N)^2 - N^2, N ~ N(0, sigma^2).
CoordinateMoments y_moments(double t, double sigma);

/// Moments of C = g(2|mu| + shift + N)^2 - g(shift + N)^2 with g the soft
/// threshold at eps_des. `shift` is the attack on this coordinate
/// multiplied by sign(mu); the sign attack at strength eps_act is
/// shift = -eps_act.
CoordinateMoments cost_difference_moments(double abs_mu, double shift,
                                          double eps_des, double sigma);

/// Moments of the GLRT cost difference C_1[i] - C_0[i] under H_0 and the
/// sign attack at strength eps_act.
CoordinateMoments coordinate_cost_moments(double abs_mu, double eps_des,
                                          double eps_act, double sigma);

/// Q(sum m / sqrt(sum rho^2)), signed so a negative drift gives P_e > 1/2.
/// With zero total variance the limit is 0, 1/2 or 1 by the sign of the drift.
double clt_error_probability(std::span<const CoordinateMoments> moments);

/// CLT estimate over the bound variables Y_i; an approximate upper bound on
/// the GLRT error when the attack uses the full design budget.
double clt_error_upper_bound(std::span<const BoundVariableParams> params);

/// (a - k)^2 d p (eps_des / sigma)^2.
double snr_minimax(double d, double p, double a, double k, double eps_des,
                   double sigma);

/// d (p m_a + (1-p) m_b)^2 / (p rho_a^2 + (1-p) rho_b^2).
double snr_glrt(double d, double p, const CoordinateMoments& moments_a,
                const CoordinateMoments& moments_b);

/// Q(sqrt(snr)).
double error_from_snr(double snr);

/// Signed two-level GLRT prediction: Q applied to the signed square root of
/// snr_glrt, so a negative aggregate drift gives P_e > 1/2.
double glrt_two_level_error(double d, double p, const CoordinateMoments& moments_a,
                            const CoordinateMoments& moments_b);

/// Q((||mu||^2 - eps ||mu||_1) / (sigma ||mu||)): matched filter w = mu
/// under the sign attack.
double clean_error_closed_form(const Vector& mu, double eps_act, double sigma);

/// Exact error of the linear rule w under H_0 with perturbation attack_h0.
/// An all-zero w always ties to H_0, so the prior-averaged error is 1/2.
double linear_error_closed_form(const Vector& w, const Vector& mu,
                                const Vector& attack_h0, double sigma);

/// Per-coordinate GLRT cost moments for mean +mu under perturbation
/// attack_h0. Coordinates sharing (|mu_i|, shift_i) are integrated once.
std::vector<CoordinateMoments> glrt_coordinate_moments(const Vector& mu,
                                                       const Vector& attack_h0,
                                                       double eps_des, double sigma);

/// CLT estimate of the GLRT error for mean +mu under attack_h0.
double glrt_clt_error(const Vector& mu, const Vector& attack_h0, double eps_des,
                      double sigma);

/// Y-bound estimate of the GLRT error under the full-budget sign attack.
double glrt_bound_error(const Vector& mu, double eps, double sigma);

}  // namespace advglrt

#endif  // ADVGLRT_ANALYSIS_HPP
