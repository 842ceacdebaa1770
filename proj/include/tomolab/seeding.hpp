#ifndef TOMOLAB_SEEDING_HPP
#define TOMOLAB_SEEDING_HPP

#include <cstdint>
#include <initializer_list>

namespace tomolab {

/// One round of the splitmix64 mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stream seed keyed by (base, k0, k1, ...). Depends only on the keys, so
/// trial results never depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632BE59BD9B4E019ULL));
  return h;
}

}  // namespace tomolab

#endif  // TOMOLAB_SEEDING_HPP
