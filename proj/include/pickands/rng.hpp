#pragma once

#include <cmath>
#include <cstdint>

namespace pickands {

// Counter-based generator (Philox-4x64, 10 rounds). The key is
// (seed, stream_id) and the 256-bit counter block is
// [draw_counter, substream, lane, 0], so any (seed, stream, substream, lane)
// tuple addresses an independent sequence in O(1) — no jump-ahead walk.
//
// Streams are value types: copying one replays it. Estimators never consume
// from the stream they are handed; they spawn (substream, lane) children, so a
// run is a pure function of (seed, stream_id) and the sample layout.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0,
                     std::uint64_t substream = 0, std::uint64_t lane = 0)
      : key0_(seed), key1_(stream_id), ctr1_(substream), ctr2_(lane) {}

  std::uint64_t seed() const { return key0_; }
  std::uint64_t stream_id() const { return key1_; }

  // Child stream for deterministic partitioning of one logical computation.
  RngStream spawn(std::uint64_t substream, std::uint64_t lane = 0) const {
    return RngStream(key0_, key1_, substream, lane);
  }

  std::uint64_t next_u64() {
    if (idx_ == 4) {
      generate_block();
      idx_ = 0;
    }
    return block_[idx_++];
  }

  // Uniform on (0,1]; never 0, so log(uniform01()) is finite.
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal, Box-Muller (pairs cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform01()));
    const double a = 6.28318530717958647692 * uniform01();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    lo = static_cast<std::uint64_t>(p);
    return static_cast<std::uint64_t>(p >> 64);
  }

  void generate_block() {
    constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ull;
    constexpr std::uint64_t M1 = 0xCA5A826395121157ull;
    constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ull;
    constexpr std::uint64_t W1 = 0xBB67AE8584CAA73Bull;
    std::uint64_t c0 = ctr0_, c1 = ctr1_, c2 = ctr2_, c3 = ctr3_;
    std::uint64_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      std::uint64_t lo0, lo1;
      const std::uint64_t hi0 = mulhilo(M0, c0, lo0);
      const std::uint64_t hi1 = mulhilo(M1, c2, lo1);
      const std::uint64_t n0 = hi1 ^ c1 ^ k0;
      const std::uint64_t n2 = hi0 ^ c3 ^ k1;
      c0 = n0;
      c1 = lo1;
      c2 = n2;
      c3 = lo0;
      k0 += W0;
      k1 += W1;
    }
    block_[0] = c0;
    block_[1] = c1;
    block_[2] = c2;
    block_[3] = c3;
    ++ctr0_;  // 2^64 blocks per (substream, lane): never wraps in practice
  }

  std::uint64_t key0_, key1_;
  std::uint64_t ctr0_ = 0, ctr1_ = 0, ctr2_ = 0, ctr3_ = 0;
  std::uint64_t block_[4] = {0, 0, 0, 0};
  int idx_ = 4;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace pickands
