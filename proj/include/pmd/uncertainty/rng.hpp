#pragma once

#include <array>
#include <cstdint>

namespace pmd::mc {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Output is a
/// pure function of (key, counter), so draws can be made in any order.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key) noexcept;
};

/// Stream of standard normal variates identified by (seed, stream, substream),
/// e.g. (scenario seed, feature index, sample index). Independent streams
/// never share a Philox counter.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint32_t stream, std::uint32_t substream) noexcept;

  double next() noexcept;

 private:
  void refill() noexcept;

  Philox4x32::Key key_;
  std::uint32_t stream_;
  std::uint32_t substream_;
  std::uint32_t block_ = 0;
  std::array<double, 2> cache_{};
  int cached_ = 0;
};

}  // namespace pmd::mc
