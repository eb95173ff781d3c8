#include "wivar/rng.hpp"

#include <cmath>

namespace wivar {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : engine_(mix64(seed) ^ mix64(mix64(stream_id) + 0x632BE59BD9B4E019ULL)),
      seed_(seed),
      stream_id_(stream_id) {}

RngStream RngStream::split(std::uint64_t substream) const {
  return RngStream(seed_, mix64(stream_id_ * 0x100000001B3ULL + substream + 1));
}

std::uint64_t RngStream::raw() { return engine_(); }

double RngStream::uniform() {
  return static_cast<double>(raw() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  double u2 = uniform();
  double radius = std::sqrt(-2.0 * std::log(u1));
  cached_normal_ = radius * std::sin(kTwoPi * u2);
  has_cached_normal_ = true;
  return radius * std::cos(kTwoPi * u2);
}

double RngStream::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw std::invalid_argument("gamma draw requires positive shape and scale");
  }
  if (shape < 1.0) {
    // Boost to shape + 1, then apply the power correction.
    double u = uniform();
    if (u <= 0.0) u = 0x1.0p-53;
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v * scale;
    }
  }
}

double RngStream::chi_square(double dof) { return gamma(0.5 * dof, 2.0); }

double RngStream::inverse_gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw std::invalid_argument(
        "inverse gamma draw requires positive shape and scale");
  }
  return scale / gamma(shape, 1.0);
}

}  // namespace wivar
