#include "modcomp/seed.hpp"

namespace modcomp {

namespace {

// splitmix64 finaliser
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Seed::key() const {
  std::uint64_t h = mix64(base);
  for (std::uint64_t label : {sweep, n, rep, stream}) h = mix64(h ^ mix64(label));
  return h;
}

Engine make_engine(const Seed& seed) {
  const std::uint64_t k = seed.key();
  std::seed_seq seq{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
                    static_cast<std::uint32_t>(mix64(k)), static_cast<std::uint32_t>(mix64(k) >> 32)};
  return Engine(seq);
}

}  // namespace modcomp
