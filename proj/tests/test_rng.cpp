#include "dfchain/rng.hpp"

#include <doctest.h>

#include <set>

using dfc::Philox4x32;

TEST_CASE("philox known answers") {
  using B = Philox4x32::Block;
  CHECK(Philox4x32::bijection(B{0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::bijection(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::bijection(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  Philox4x32 a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  std::set<std::uint64_t> seen;
  for (int k = 0; k < 1000; ++k) {
    const auto x = a();
    CHECK(x == b());
    seen.insert(x);
    seen.insert(c());
    seen.insert(d());
  }
  CHECK(seen.size() == 3000);
}

TEST_CASE("unit interval draws") {
  Philox4x32 g(1, 2);
  double lo = 1, hi = 0, sum = 0;
  for (int k = 0; k < 100000; ++k) {
    const double u = g.open01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
  CHECK(lo < 1e-3);
  CHECK(hi > 1 - 1e-3);
}
