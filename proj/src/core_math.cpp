#include "advglrt/core_math.hpp"

#include <numbers>

namespace advglrt {

double q_function(double x) {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double std_normal_pdf(double x) {
  constexpr double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53;
constexpr std::uint32_t kMulB = 0xCD9E8D57;
constexpr std::uint32_t kWeylA = 0x9E3779B9;
constexpr std::uint32_t kWeylB = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                    std::uint32_t& hi) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

// 53 random bits mapped to the open interval (0, 1).
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::encrypt(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMulA, ctr[0], lo0, hi0);
    mulhilo(kMulB, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

GaussianSource::GaussianSource(RandomStream stream)
    : key_{static_cast<std::uint32_t>(stream.master_seed),
           static_cast<std::uint32_t>(stream.master_seed >> 32)},
      stream_index_(stream.stream_index) {}

void GaussianSource::refill() {
  const Philox4x32::Counter ctr{
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_index_),
      static_cast<std::uint32_t>(stream_index_ >> 32)};
  const auto out = Philox4x32::encrypt(ctr, key_);
  ++block_;
  uniforms_ = {to_open_unit(out[0], out[1]), to_open_unit(out[2], out[3])};
  uniforms_left_ = 2;
}

double GaussianSource::uniform() {
  if (uniforms_left_ == 0) refill();
  return uniforms_[2 - uniforms_left_--];
}

double GaussianSource::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Vector sample_gaussian_vector(const RandomStream& stream, Eigen::Index d,
                              double sigma) {
  if (d < 1) throw std::invalid_argument("sample_gaussian_vector: d must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("sample_gaussian_vector: sigma must be > 0");
  }
  GaussianSource source(stream);
  Vector out(d);
  fill_gaussian(source, sigma, out);
  return out;
}

}  // namespace advglrt
