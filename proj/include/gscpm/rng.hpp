#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gscpm {

namespace detail {

constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ull;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Gamma derivation used by SplittableRandom: odd, with enough bit transitions.
constexpr std::uint64_t mix_gamma(std::uint64_t z) noexcept {
  z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
  z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
  z = (z ^ (z >> 33)) | 1ull;
  if (std::popcount(z ^ (z >> 1)) < 24) z ^= 0xaaaaaaaaaaaaaaaaull;
  return z;
}

}  // namespace detail

/// Per-task random stream.
///
/// A SplitMix64 generator whose (state, gamma) pair is a pure function of the
/// global seed and the task id, so every task draws from its own substream and
/// results do not depend on which worker runs the task. Values are produced in
/// blocks of at most `max_batch` (65,536 by default); block boundaries never
/// change the delivered sequence. Blocks start small and double, so short-lived
/// tasks do not pay for a full 64K block.
class RngStream {
public:
  using result_type = std::uint64_t;

  static constexpr std::size_t default_max_batch = std::size_t{1} << 16;
  static constexpr std::size_t initial_batch = 256;

  RngStream(std::uint64_t seed, std::uint64_t task_id,
            std::size_t max_batch = default_max_batch)
      : state_(detail::mix64(seed + (2 * task_id + 1) * detail::golden_gamma)),
        gamma_(detail::mix_gamma(seed + (2 * task_id + 2) * detail::golden_gamma)),
        max_batch_(max_batch) {
    if (max_batch_ == 0) throw std::invalid_argument("RngStream: max_batch must be >= 1");
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (cursor_ == buffer_.size()) refill();
    return buffer_[cursor_++];
  }

  // Uniform on [0, bound) via multiply-shift with rejection (no modulo bias).
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be >= 1");
    auto product = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  std::size_t max_batch() const noexcept { return max_batch_; }

private:
  void refill() {
    const std::size_t n = buffer_.empty()
                              ? std::min(initial_batch, max_batch_)
                              : std::min(buffer_.size() * 2, max_batch_);
    buffer_.resize(n);
    for (auto& v : buffer_) {
      state_ += gamma_;
      v = detail::mix64(state_);
    }
    cursor_ = 0;
  }

  std::uint64_t state_;
  std::uint64_t gamma_;
  std::size_t max_batch_;
  std::vector<std::uint64_t> buffer_;
  std::size_t cursor_ = 0;
};

inline RngStream stream_for_task(std::uint64_t seed, std::uint64_t task_id) {
  return RngStream(seed, task_id);
}

}  // namespace gscpm
