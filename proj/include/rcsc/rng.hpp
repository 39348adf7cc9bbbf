#pragma once

#include <cstdint>
#include <random>

namespace rcsc {

/// Engine used for every stochastic routine in the library.
using Generator = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for replicate `index` of stream `stream` under a master seed.
/// Distinct (stream, index) pairs give unrelated seeds, so results do not
/// depend on how replicates are scheduled across threads.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ stream) + index);
}

inline Generator make_generator(std::uint64_t master, std::uint64_t stream,
                                std::uint64_t index = 0) {
  return Generator{stream_seed(master, stream, index)};
}

/// Uniform double in [0,1) with 53 random bits. Platform independent, unlike
/// std::uniform_real_distribution.
inline double uniform01(Generator& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform(Generator& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

// Named stream identifiers. Keeping them in one place avoids accidental reuse
// of a stream by two unrelated consumers.
namespace streams {
inline constexpr std::uint64_t kPoints = 0x11;
inline constexpr std::uint64_t kMarks = 0x12;
inline constexpr std::uint64_t kZeta = 0x21;
inline constexpr std::uint64_t kStationary = 0x22;
inline constexpr std::uint64_t kNu = 0x23;
inline constexpr std::uint64_t kEmpirical = 0x31;
inline constexpr std::uint64_t kGammaOuter = 0x41;
inline constexpr std::uint64_t kGammaInner = 0x42;
inline constexpr std::uint64_t kFourthMoment = 0x43;
inline constexpr std::uint64_t kClt = 0x51;
}  // namespace streams

}  // namespace rcsc
