#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace slowfast {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent seeds from (root, replica, stream).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

enum class Stream : std::uint64_t { clock = 1, fast = 2, kernel = 3, aux = 4 };

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t replica, Stream stream) {
  std::uint64_t h = splitmix64(root);
  h = splitmix64(h ^ splitmix64(replica + 0x632BE59BD9B4E019ULL));
  return splitmix64(h ^ static_cast<std::uint64_t>(stream));
}

inline Rng make_stream(std::uint64_t root, std::uint64_t replica, Stream stream) {
  return Rng{derive_seed(root, replica, stream)};
}

// Uniform draw on the open interval (0,1), 53-bit resolution.
inline double uniform_open(Rng& rng) {
  for (;;) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

inline double exponential(Rng& rng, double rate) {
  if (rate <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(uniform_open(rng)) / rate;
}

inline double standard_normal(Rng& rng) {
  // Box-Muller, one value per call keeps the stream stateless.
  const double u1 = uniform_open(rng);
  const double u2 = uniform_open(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform_open(rng) * static_cast<double>(n)) % n;
}

/// The three disjoint substreams owned by one replica: jump-epoch thresholds,
/// fast-path noise and kernel draws.
struct ReplicaStreams {
  Rng clock;
  Rng fast;
  Rng kernel;

  ReplicaStreams(std::uint64_t root, std::uint64_t replica)
      : clock(make_stream(root, replica, Stream::clock)),
        fast(make_stream(root, replica, Stream::fast)),
        kernel(make_stream(root, replica, Stream::kernel)) {}
};

}  // namespace slowfast
