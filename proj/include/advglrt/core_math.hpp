// Scalar and vector kernels shared by the detectors, the analytical
// predictors and the Monte Carlo engine.
#ifndef ADVGLRT_CORE_MATH_HPP
#define ADVGLRT_CORE_MATH_HPP

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

namespace advglrt {

using Vector = Eigen::VectorXd;

/// sign(x) with sign(0) = 0.
template <std::floating_point Scalar>
inline Scalar sign(Scalar x) {
  return static_cast<Scalar>((Scalar(0) < x) - (x < Scalar(0)));
}

inline void require_budget(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("perturbation budget must be finite and >= 0");
  }
}

/// Double-sided ReLU: sign(x) * max(0, |x| - eps).
///
/// The excess is rounded so that x - soft_threshold(x, eps) is exact and never
/// leaves [-eps, eps]; both hold in floating point, not only in real arithmetic.
template <std::floating_point Scalar>
inline Scalar soft_threshold(Scalar x, Scalar eps) {
  using std::abs;
  const Scalar magnitude = abs(x);
  Scalar excess = magnitude - eps;
  if (!(excess > Scalar(0))) return Scalar(0);
  // |x| - excess is exact here (Sterbenz); undo a downward rounding.
  if (magnitude - excess > eps) {
    excess = std::nextafter(excess, magnitude);
  }
  return x < Scalar(0) ? -excess : excess;
}

/// x - soft_threshold(x, eps), i.e. x clamped to [-eps, eps].
template <std::floating_point Scalar>
inline Scalar clamp_complement(Scalar x, Scalar eps) {
  return x - soft_threshold(x, eps);
}

/// Coordinate-wise soft threshold of any Eigen expression.
template <typename Derived>
auto soft_threshold(const Eigen::MatrixBase<Derived>& x,
                    typename Derived::Scalar eps) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([eps](Scalar v) { return soft_threshold(v, eps); });
}

template <typename Derived>
auto clamp_complement(const Eigen::MatrixBase<Derived>& x,
                      typename Derived::Scalar eps) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([eps](Scalar v) { return clamp_complement(v, eps); });
}

template <typename Derived>
auto sign(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([](Scalar v) { return sign(v); });
}

/// Complementary standard normal CDF, Q(x) = P(Z > x).
double q_function(double x);

/// Standard normal density.
double std_normal_pdf(double x);

/// Philox4x32-10 counter-based block cipher.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter encrypt(Counter ctr, Key key);
};

/// Identifies one independent Gaussian sequence. Immutable, cheap to copy.
struct RandomStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

/// Sequential reader over the Gaussian sequence keyed by a RandomStream.
/// Draw i depends only on (master_seed, stream_index, i).
class GaussianSource {
 public:
  explicit GaussianSource(RandomStream stream);

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal via Box-Muller; normals are produced in pairs.
  double normal();

 private:
  void refill();

  Philox4x32::Key key_{};
  std::uint64_t stream_index_ = 0;
  std::uint64_t block_ = 0;
  std::array<double, 2> uniforms_{};
  int uniforms_left_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// d independent N(0, sigma^2) draws from the given stream.
Vector sample_gaussian_vector(const RandomStream& stream, Eigen::Index d,
                              double sigma);

/// Fills `out` with N(0, sigma^2) draws from `source`.
template <typename Derived>
void fill_gaussian(GaussianSource& source, double sigma,
                   Eigen::MatrixBase<Derived>& out) {
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out(i) = sigma * source.normal();
  }
}

}  // namespace advglrt

#endif  // ADVGLRT_CORE_MATH_HPP
