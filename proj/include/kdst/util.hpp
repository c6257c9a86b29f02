#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace kdst {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent RNG stream id for (seed, attempt, iteration) triples. Streams
// are derived, not sequential, so iterations can run on any thread and still
// reproduce bit-identically.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t attempt,
                                   std::uint64_t iteration) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ (attempt * 0x9e3779b97f4a7c15ULL + 1));
  s = splitmix64(s ^ (iteration * 0xd1b54a32d192ed03ULL + 1));
  return s;
}

// Uniform double in [0,1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
template <typename Rng>
double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection; deterministic across platforms.
template <typename Rng>
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % bound;
}

// Runs fn(i) for i in [0, count). Each index must be independent; results are
// written to per-index slots by the caller, so the schedule cannot change the
// outcome.
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

} // namespace kdst
