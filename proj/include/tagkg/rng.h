#ifndef TAGKG_RNG_H_
#define TAGKG_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace tagkg {

using Rng = std::mt19937_64;

// Derives an independent seed for a named stream from the run seed, so every
// stage draws from its own generator and adding a stage never shifts another
// stage's numbers.
inline uint64_t DeriveSeed(uint64_t seed, std::string_view stream) {
  uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : stream) {
    h ^= c;
    h *= 1099511628211ull;
  }
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (h | 1);  // splitmix64 finalizer
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline Rng MakeRng(uint64_t seed, std::string_view stream) {
  return Rng(DeriveSeed(seed, stream));
}

}  // namespace tagkg

#endif  // TAGKG_RNG_H_
