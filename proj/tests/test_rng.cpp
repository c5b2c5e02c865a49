#include <cmath>
#include <cstdint>
#include <vector>

#include "bandlet/rng.hpp"
#include "doctest.h"

using bandlet::Philox;

TEST_CASE("philox known-answer vectors") {
  uint32_t out[4];

  // counter 0, key 0
  Philox::block(0, 0, 0, out);
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  // all-ones counter and key
  Philox::block(0xffffffffffffffffull, 0xffffffffffffffffull,
                0xffffffffffffffffull, out);
  CHECK(out[0] == 0x408f276du);
  CHECK(out[1] == 0x41c83b0eu);
  CHECK(out[2] == 0xa20bc7c6u);
  CHECK(out[3] == 0x6d5451fdu);

  // pi-digit counter, golden-ratio key
  Philox::block(0x299f31d0a4093822ull, 0x0370734413198a2eull,
                0x85a308d3243f6a88ull, out);
  CHECK(out[0] == 0xd16cfe09u);
  CHECK(out[1] == 0x94fdccebu);
  CHECK(out[2] == 0x5001e420u);
  CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("stream consumes blocks in order") {
  Philox rng(42, 7);
  uint32_t b0[4], b1[4];
  Philox::block(42, 7, 0, b0);
  Philox::block(42, 7, 1, b1);
  for (int i = 0; i < 4; ++i) CHECK(rng.next_u32() == b0[i]);
  for (int i = 0; i < 4; ++i) CHECK(rng.next_u32() == b1[i]);
}

TEST_CASE("uniform lies in (0,1] and is centered") {
  Philox rng(1);
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    double u = rng.next_uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u <= 1.0);
    sum += u;
  }
  double mean = sum / n;
  // 3 standard errors of the mean of U(0,1]
  CHECK(std::fabs(mean - 0.5) < 3.0 / std::sqrt(12.0 * n));
}

TEST_CASE("gaussian moments") {
  Philox rng(2);
  const int n = 200000;
  std::vector<double> g(n);
  rng.fill_gaussian(g.data(), g.size());
  double sum = 0, sum2 = 0, sum4 = 0;
  for (double v : g) {
    sum += v;
    sum2 += v * v;
    sum4 += v * v * v * v;
  }
  double mean = sum / n;
  double var = sum2 / n - mean * mean;
  double kurt = sum4 / n;
  CHECK(std::fabs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(var - 1.0) < 3.0 * std::sqrt(2.0 / n));
  // fourth moment of a standard normal is 3, sd of the estimate ~ sqrt(96/n)
  CHECK(std::fabs(kurt - 3.0) < 4.0 * std::sqrt(96.0 / n));
}

TEST_CASE("substreams are independent and reproducible") {
  Philox a(9, 0), b(9, 1), c(9, 0);
  bool any_diff = false;
  for (int i = 0; i < 64; ++i) {
    uint32_t va = a.next_u32(), vb = b.next_u32(), vc = c.next_u32();
    if (va != vb) any_diff = true;
    CHECK(va == vc);
  }
  CHECK(any_diff);
}

TEST_CASE("gaussian sequence is deterministic") {
  Philox a(123, 5), b(123, 5);
  for (int i = 0; i < 100; ++i) CHECK(a.next_gaussian() == b.next_gaussian());
}

TEST_CASE("draw order does not depend on history") {
  // block addressing: the 10th u64 of a stream equals blocks 5's words
  Philox a(77, 3);
  for (int i = 0; i < 20; ++i) a.next_u32();
  uint32_t direct[4];
  Philox::block(77, 3, 5, direct);
  CHECK(a.next_u32() == direct[0]);
}
