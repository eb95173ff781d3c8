#pragma once

#include <cstdint>
#include <random>

#include "wivar/common.hpp"

namespace wivar {

// Seeded random stream. One engine family (mt19937_64) plus our own
// variate transforms, so a (seed, stream_id, call sequence) triple gives
// bit-identical output on a given platform regardless of the standard
// library's distribution implementations.
//
// Streams are single-owner. Parallel work derives child streams with
// split(), which is deterministic and independent of thread scheduling.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  RngStream split(std::uint64_t substream) const;

  std::uint64_t raw();
  double uniform();  // [0, 1)
  double normal();   // N(0, 1), Box-Muller with pair caching
  double gamma(double shape, double scale);          // Marsaglia-Tsang
  double chi_square(double dof);
  double inverse_gamma(double shape, double scale);  // mean scale/(shape-1)

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace wivar
