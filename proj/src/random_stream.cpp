#include "herman/random_stream.hpp"

namespace herman {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

std::uint64_t mix64(std::uint64_t z) { return finalize(z + kGolden); }

std::uint64_t RandomStream::next_u64() {
  state_ += kGolden;
  return finalize(state_);
}

bool RandomStream::coin() {
  if (coins_left_ == 0) {
    coin_word_ = next_u64();
    coins_left_ = 64;
  }
  const bool bit = (coin_word_ & 1U) != 0;
  coin_word_ >>= 1;
  --coins_left_;
  return bit;
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::below(std::uint64_t bound) {
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t index) {
  return RandomStream(mix64(master_seed ^ mix64(index)));
}

}  // namespace herman
