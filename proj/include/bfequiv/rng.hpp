#pragma once

#include <cstdint>
#include <random>

namespace bfe {

// Reproducible random stream. Two streams built from the same (seed, stream_id)
// produce identical draws on every platform: the engine and seed_seq are fully
// specified by the standard and all variate transforms are implemented here.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  // Gamma with unit rate.
  double gamma(double shape);
  double chi_square(double df) { return 2.0 * gamma(0.5 * df); }
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Independent substream identifier for a pair of indices (e.g. grid point, chunk).
std::uint64_t substream(std::uint64_t a, std::uint64_t b) noexcept;

}  // namespace bfe
