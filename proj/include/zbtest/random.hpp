// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ZBTEST_RANDOM_HPP
#define ZBTEST_RANDOM_HPP

#include <array>
#include <cstdint>

namespace zbtest {

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Counter-based reproducible random stream.  A stream is identified by a
// master seed plus a path of child indices; streams with distinct
// (seed, path) pairs are statistically independent, and identical pairs
// reproduce identical draws on any machine and under any work scheduling.
// Draws use only integer arithmetic plus double rounding, so sequences are
// bit-stable across platforms.
class RandomStream {
 public:
  static constexpr int kMaxDepth = 8;

  explicit RandomStream(std::uint64_t master_seed)
      : master_seed_(master_seed), depth_(0) {
    reseed();
  }

  // Derived stream: this stream's path extended by `index`.
  // Derivation does not disturb the parent's draw sequence.
  RandomStream child(std::uint64_t index) const {
    RandomStream c(*this);
    c.path_[c.depth_ % kMaxDepth] ^= detail::splitmix64(index + 1);
    ++c.depth_;
    c.reseed();
    return c;
  }

  std::uint64_t master_seed() const { return master_seed_; }
  int depth() const { return depth_; }

  // xoshiro256++ step.
  std::uint64_t u64() {
    const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  // Uniform double strictly inside (0, 1); 53-bit resolution.
  double unit() { return (static_cast<double>(u64() >> 11) + 0.5) * 0x1.0p-53; }

  // Uniform double on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  void reseed() {
    std::uint64_t h = detail::splitmix64(master_seed_);
    for (int i = 0; i < kMaxDepth; ++i) {
      h = detail::splitmix64(h ^ detail::splitmix64(path_[i]));
    }
    for (auto& w : s_) {
      h = detail::splitmix64(h);
      w = h;
    }
    // xoshiro state must not be all zero; splitmix output never is for
    // all four words simultaneously, but keep the guard explicit.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  std::uint64_t master_seed_;
  std::array<std::uint64_t, kMaxDepth> path_{};
  int depth_;
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace zbtest

#endif  // ZBTEST_RANDOM_HPP
