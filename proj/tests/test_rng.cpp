#include <doctest.h>

#include <cstdlib>
#include <set>
#include <vector>

#include "dyngibbs/rng.hpp"

using namespace dyngibbs;

TEST_SUITE("rng")
{
TEST_CASE("philox known answers")
{
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0})
          == PhiloxBlock{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff})
          == PhiloxBlock{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0})
          == PhiloxBlock{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct")
{
    Rng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 100; ++i)
    {
        auto x = a.next_u64();
        CHECK(x == b.next_u64());
        seen.insert(x);
        seen.insert(c.next_u64());
        seen.insert(d.next_u64());
    }
    CHECK(seen.size() == 300);
    CHECK(a.split(4).next_u64() == Rng(7, 4).next_u64());
}

TEST_CASE("uniform draws stay in range")
{
    Rng r(1, 0);
    std::vector<int> hist(5, 0);
    for (int i = 0; i < 50000; ++i)
    {
        double u = r.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        double v = r.uniform_open0();
        REQUIRE(v > 0.0);
        REQUIRE(v <= 1.0);
        ++hist[r.uniform_index(5)];
    }
    for (int h : hist)
        CHECK(std::abs(h - 10000) < 500);
    CHECK(r.uniform_index(1) == 0);
}
}
