#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>

namespace fwmc {

// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key);
};

// Stable 64-bit mix of (base seed, index); replication r of a study uses
// derive_seed(base_seed, r).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Random stream keyed by a 64-bit seed. Draw k of the stream is block k/2
// of Philox under that key, so a stream is fully determined by its seed.
// Variate algorithms are implemented here, not taken from <random>, so
// results are identical across standard libraries.
class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  bool bernoulli(double p) { return uniform() < p; }
  // Box-Muller; the second variate of each pair is cached.
  double normal();
  double normal(double mean, double variance);
  // Gamma with density proportional to w^(shape-1) exp(-rate w)
  // (Marsaglia-Tsang squeeze).
  double gamma(double shape, double rate);
  // 1/W for W ~ Gamma(shape, rate): density proportional to
  // x^(-shape-1) exp(-rate/x).
  double inverse_gamma(double shape, double rate);

private:
  std::uint64_t seed_;
  Philox4x32::Key key_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  std::optional<double> spare_normal_;
};

}  // namespace fwmc
