#pragma once
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace bandlet {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// The 128-bit counter is split into a 64-bit stream id (high half) and a
// 64-bit block index (low half), so (seed, stream) pairs give independent
// substreams whose draws do not depend on evaluation order.
class Philox {
 public:
  explicit Philox(uint64_t seed, uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  static void block(uint64_t seed, uint64_t stream, uint64_t index,
                    uint32_t out[4]) {
    uint32_t c0 = uint32_t(index), c1 = uint32_t(index >> 32);
    uint32_t c2 = uint32_t(stream), c3 = uint32_t(stream >> 32);
    uint32_t k0 = uint32_t(seed), k1 = uint32_t(seed >> 32);
    for (int r = 0; r < 10; ++r) {
      uint64_t p0 = uint64_t(c0) * 0xD2511F53u;
      uint64_t p1 = uint64_t(c2) * 0xCD9E8D57u;
      uint32_t n0 = uint32_t(p1 >> 32) ^ c1 ^ k0;
      uint32_t n1 = uint32_t(p1);
      uint32_t n2 = uint32_t(p0 >> 32) ^ c3 ^ k1;
      uint32_t n3 = uint32_t(p0);
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    out[0] = c0;
    out[1] = c1;
    out[2] = c2;
    out[3] = c3;
  }

  uint32_t next_u32() {
    if (have_ == 0) {
      block(seed_, stream_, index_++, buf_);
      have_ = 4;
    }
    return buf_[4 - have_--];
  }

  uint64_t next_u64() {
    uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // uniform on (0,1], 53 random bits
  double next_uniform() {
    uint64_t x = next_u64() >> 11;
    return double(x + 1) * 0x1p-53;
  }

  // standard normal via Box-Muller; values come in deterministic pairs
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_uniform();
    double u2 = double(next_u64() >> 11) * 0x1p-53;  // [0,1)
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  void fill_gaussian(double* dst, size_t n) {
    for (size_t i = 0; i < n; ++i) dst[i] = next_gaussian();
  }

 private:
  uint64_t seed_, stream_;
  uint64_t index_ = 0;
  uint32_t buf_[4] = {0, 0, 0, 0};
  int have_ = 0;
  double spare_ = 0;
  bool has_spare_ = false;
};

}  // namespace bandlet
