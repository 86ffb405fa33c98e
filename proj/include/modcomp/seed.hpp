#pragma once

#include <cstdint>
#include <random>

namespace modcomp {

/** Labels identifying one pseudo-random stream.
 *
 * Streams are derived by hashing every label together with the base seed, so
 * replications can be generated in any order (or in parallel) and still see
 * exactly the same numbers.
 */
struct Seed {
  std::uint64_t base = 0;
  std::uint64_t sweep = 0;
  std::uint64_t n = 0;
  std::uint64_t rep = 0;
  /// Distinguishes independent uses of the same (sweep, n, rep), e.g. data vs. coefficients.
  std::uint64_t stream = 0;

  Seed with_sweep(std::uint64_t s) const { Seed c = *this; c.sweep = s; return c; }
  Seed with_n(std::uint64_t v) const { Seed c = *this; c.n = v; return c; }
  Seed with_rep(std::uint64_t r) const { Seed c = *this; c.rep = r; return c; }
  Seed with_stream(std::uint64_t s) const { Seed c = *this; c.stream = s; return c; }

  /// 64-bit key mixing all labels.
  std::uint64_t key() const;

  friend bool operator==(const Seed&, const Seed&) = default;
};

namespace streams {
inline constexpr std::uint64_t data = 0;
inline constexpr std::uint64_t coefficients = 1;
inline constexpr std::uint64_t prior_draw = 2;
}  // namespace streams

using Engine = std::mt19937_64;

Engine make_engine(const Seed& seed);

}  // namespace modcomp
