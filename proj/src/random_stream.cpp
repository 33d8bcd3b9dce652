#include "nic/random_stream.hpp"

#include <limits>

namespace nic {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) {
  const std::uint64_t golden = 0x9e3779b97f4a7c15ULL;
  return mix64(mix64(master + golden) ^ (stream_id * golden + 0x632be59bd9b4e019ULL));
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

}  // namespace nic
