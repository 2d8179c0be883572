#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace mbpm {

// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// Identifies one independent stream: replicate `index` under `seed`.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

// Counter-based random stream. The seed is the Philox key and the stream index
// occupies the high half of the counter, so streams never overlap and any
// stream can be regenerated without touching the others. Satisfies
// UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(StreamKey key);
  Stream(std::uint64_t seed, std::uint64_t index) : Stream(StreamKey{seed, index}) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on the open interval (0, 1).
  double uniform01();

  const StreamKey& key() const noexcept { return key_; }
  std::uint64_t blocks_consumed() const noexcept { return block_; }

 private:
  void refill();

  StreamKey key_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int next_ = 2;  // index of next 64-bit word in buffer_ (0 or 1); 2 = empty
};

}  // namespace mbpm
