#pragma once

#include <array>
#include <cstdint>

namespace segscore {

/// Philox4x64-10 block function (Salmon et al., Random123).
/// Maps a 256-bit counter and a 128-bit key to 256 random bits.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key);

/// Independent substreams carved out of one (master_seed, stream_index) pair.
enum class Lane : std::uint64_t {
  steps = 0,       // the step sequence xi_1, xi_2, ...
  auxiliary = 1,   // Poisson clocks and other per-path side draws
  continuation = 2 // tilted continuation and acceptance uniforms
};

/// Counter-based random stream keyed by (master_seed, stream_index, lane).
///
/// Equal keys give identical sequences on every platform; the generator is
/// a pure function of the key and a block counter, so streams can be created
/// in any order on any thread. Not thread-safe: one owner at a time.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index,
            Lane lane = Lane::steps);

  std::uint64_t master_seed() const noexcept { return key_[0]; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }
  Lane lane() const noexcept { return lane_; }

  /// Stream with the same key but a different lane.
  RngStream substream(Lane lane) const {
    return RngStream(key_[0], stream_index_, lane);
  }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  /// Standard normal via Box-Muller; the second variate of each pair is kept.
  double normal();
  /// Standard exponential.
  double exponential();

 private:
  void refill();

  std::array<std::uint64_t, 2> key_;
  std::uint64_t stream_index_;
  Lane lane_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 4> buffer_{};
  int buffer_pos_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace segscore
