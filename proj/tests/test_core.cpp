#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "probecert/bits.hpp"
#include "probecert/rng.hpp"

using namespace probecert;

TEST_CASE("rng is deterministic and substreams are independent of consumption") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

  Rng c(42);
  Rng s1 = c.substream(3);
  c.next_u64();
  c.next_u64();
  Rng s2 = c.substream(3);
  REQUIRE(s1.next_u64() == s2.next_u64());

  Rng d(43);
  REQUIRE(Rng(42).next_u64() != d.next_u64());
}

TEST_CASE("rng next_below is in range and roughly uniform") {
  Rng r(7);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) counts[r.next_below(5)]++;
  for (int c : counts) {
    REQUIRE(c > 9000);
    REQUIRE(c < 11000);
  }
}

TEST_CASE("rng shuffle produces permutations") {
  Rng r(11);
  auto p = r.permutation(8);
  std::set<int> seen(p.begin(), p.end());
  REQUIRE(seen.size() == 8);
}

TEST_CASE("bits basic operations") {
  Bits b(10);
  REQUIRE(b.none());
  b.set(3);
  b.set(7);
  REQUIRE(b.count() == 2);
  REQUIRE(b.test(3));
  REQUIRE_FALSE(b.test(4));
  REQUIRE(b.ids() == std::vector<int>{3, 7});

  Bits c = Bits::from_ids(10, {3});
  REQUIRE(c.subset_of(b));
  REQUIRE_FALSE(b.subset_of(c));
  REQUIRE(b.intersects(c));
  REQUIRE((b & c) == c);
  REQUIRE(b.and_not(c) == Bits::from_ids(10, {7}));
}

TEST_CASE("bits width errors") {
  Bits a(5), b(6);
  REQUIRE_THROWS_AS(a.subset_of(b), DimensionError);
  REQUIRE_THROWS_AS(a.test(5), DimensionError);
  REQUIRE_THROWS_AS(Bits(2000), CapacityError);
}

TEST_CASE("wide bits agree with narrow semantics") {
  // same operations on a 64-bit-wide and a 300-bit-wide carrier
  Rng r(5);
  Bits wide(300), other(300);
  std::set<int> in_wide, in_other;
  for (int i = 0; i < 80; ++i) {
    int id = static_cast<int>(r.next_below(300));
    wide.set(id);
    in_wide.insert(id);
    id = static_cast<int>(r.next_below(300));
    other.set(id);
    in_other.insert(id);
  }
  REQUIRE(wide.count() == in_wide.size());
  std::set<int> expect_and;
  for (int id : in_wide)
    if (in_other.count(id)) expect_and.insert(id);
  REQUIRE((wide & other).count() == expect_and.size());
  REQUIRE((wide | other).count() == in_wide.size() + in_other.size() - expect_and.size());
  REQUIRE(wide.intersects(other) == !expect_and.empty());
  Bits copy = wide;
  REQUIRE(copy == wide);
  copy.reset(*in_wide.begin());
  REQUIRE(copy != wide);
  REQUIRE(copy.subset_of(wide));
}

TEST_CASE("bits ordering matches integer value") {
  REQUIRE(Bits::from_mask(4, 0b0010) < Bits::from_mask(4, 0b0100));
  REQUIRE_FALSE(Bits::from_mask(4, 0b0100) < Bits::from_mask(4, 0b0100));
}
