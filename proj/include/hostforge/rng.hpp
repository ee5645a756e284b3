#ifndef HOSTFORGE_RNG_HPP_
#define HOSTFORGE_RNG_HPP_

#include <cstdint>

namespace hostforge {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent seed for a labelled sub-task (e.g. one model in a
/// simulation run).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) noexcept {
  return splitmix64(seed ^ splitmix64(label + 0x632be59bd9b4e019ULL));
}

/// Counter-based random stream keyed on (seed, index). The n-th value depends
/// only on (seed, index, n), so work can be split across threads in any order.
class SeededStream {
 public:
  constexpr SeededStream(std::uint64_t seed, std::uint64_t index) noexcept
      : seed_(seed), index_(index), key_(derive_seed(seed, index)) {}

  [[nodiscard]] constexpr std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] constexpr std::uint64_t index() const noexcept { return index_; }

  constexpr std::uint64_t next_u64() noexcept {
    return splitmix64(key_ + 0xd1b54a32d192ed03ULL * ++counter_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1); safe for inverse CDFs.
  constexpr double uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n) (n > 0), via Lemire's multiply-shift.
  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal via inverse CDF of uniform_open().
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace hostforge

#endif  // HOSTFORGE_RNG_HPP_
