// rng.hpp -- reproducible random streams for the sampler and simulators.
//
// Generator: xoshiro256++ with its 256-bit state expanded from a 64-bit seed
// by SplitMix64 (the seeding procedure recommended by the xoshiro authors).
// Stream rule: chain k of a run with master seed s draws from Rng(s + k);
// the SplitMix64 expansion decorrelates adjacent seeds, so a chain's stream
// does not depend on how many chains run beside it.
//
// All variate transforms live here rather than in <random> because the
// standard distributions are implementation-defined; bit-reproducibility of
// a run given (data, options, seed) is part of the external contract.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace plcm {

class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal via the Marsaglia polar method (one spare cached).
  double normal();

  /// Gamma(shape, 1), shape > 0. Marsaglia-Tsang squeeze for shape >= 1,
  /// boosted by U^(1/shape) below 1.
  double gamma(double shape);

  double beta(double a, double b);

  /// Dirichlet draw via normalized Gamma variates.
  std::vector<double> dirichlet(std::span<const double> alpha);

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n), unbiased by rejection. n >= 1.
  std::uint64_t below(std::uint64_t n);

  /// Sample an index proportional to exp(logw[i]); -inf entries carry zero
  /// weight. Throws std::runtime_error if every weight is zero.
  int categorical_log(std::span<const double> logw);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

private:
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace plcm
