#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "dyngibbs/inference.hpp"

using namespace dyngibbs;

TEST_SUITE("inference")
{
TEST_CASE("schedule parsing and evaluation")
{
    auto s = parse_schedule("N=2:0.5:1,eps=0.1:-1");
    CHECK(s.count(100) == doctest::Approx(2 * 10 * (std::log(100.0) + 1)));
    CHECK(s.eps(100) == doctest::Approx(0.001));
    CHECK(s.samples(100) == std::size_t(std::ceil(s.count(100))));
    auto t = parse_schedule("N=0.1,eps=0.01");
    CHECK(t.samples(5) == 1);
    CHECK(error_of([] { parse_schedule("N=abc,eps=0.1"); }) == Errc::parse_error);
    CHECK(parse_schedule("eps=0.1").samples(10) == 100);
    CHECK(error_of([] { parse_schedule("M=3"); }) == Errc::parse_error);
    CHECK(error_of([] { parse_schedule("N=-2"); }) == Errc::parse_error);
    CHECK(error_of([] { parse_schedule("N=1:2:3:4,eps=0.1"); }) == Errc::parse_error);
}

TEST_CASE("bounded differences check")
{
    auto ok = schedule_check(parse_schedule("N=10:1,eps=0.01:-1"), 1, 200);
    CHECK(ok.ok);
    CHECK(ok.c_count == doctest::Approx(1.0));
    auto wild = schedule_check(parse_schedule("N=1:12,eps=0.01"), 1, 4);
    CHECK_FALSE(wild.ok);
    CHECK(wild.first_failure.has_value());
}

TEST_CASE("sample diff lists every changed coordinate")
{
    std::vector<Configuration> a = {{{1, 0}, {2, 1}}, {{1, 1}}};
    std::vector<Configuration> b = {{{1, 0}, {2, 0}, {3, 1}}};
    auto d = sample_diff(a, b);
    CHECK(d.chains_before == 2);
    CHECK(d.chains_after == 1);
    REQUIRE(d.size() == 3);
    CHECK(d.entries[0].vertex == 2);
    CHECK(d.entries[1].vertex == 3);
    CHECK_FALSE(d.entries[1].before.has_value());
    CHECK(d.entries[2].chain == 1);
    CHECK_FALSE(d.entries[2].after.has_value());
}

TEST_CASE("marginal, posterior, and map estimates")
{
    std::vector<Configuration> xs = {
        {{0, 0}, {1, 0}}, {{0, 0}, {1, 1}}, {{0, 1}, {1, 1}}, {{0, 1}, {1, 1}}};
    Estimator m({QueryKind::marginal, {0, 1}, {}, {}}, 2);
    m.rebuild(xs);
    CHECK(m.dimension() == 4);
    CHECK(m.estimate() == std::vector<double>{0.25, 0.25, 0, 0.5});

    Estimator p({QueryKind::posterior, {0}, {1}, {1}}, 2);
    p.rebuild(xs);
    auto post = p.estimate();
    CHECK(post[0] == doctest::Approx(1.0 / 3));
    CHECK(post[1] == doctest::Approx(2.0 / 3));

    Estimator none({QueryKind::posterior, {1}, {0}, {1}}, 2);
    none.rebuild({{{0, 0}, {1, 0}}});
    CHECK(error_of([&] { none.estimate(); }) == Errc::empty_posterior_condition);

    Estimator map({QueryKind::map, {1}, {0}, {0}}, 2);
    map.rebuild(xs);
    auto v = map.estimate();
    CHECK(v.size() == 2);
}

TEST_CASE("incremental apply matches rebuild")
{
    std::vector<Configuration> a = {{{0, 1}, {1, 0}}, {{0, 0}}, {{0, 1}, {1, 1}}};
    std::vector<Configuration> b = {{{0, 1}, {1, 1}}, {{1, 0}}, {{0, 1}, {1, 1}}, {{0, 0}}};
    Estimator e({QueryKind::marginal, {0, 1}, {}, {}}, 2);
    e.rebuild(a);
    e.apply(sample_diff(a, b));
    Estimator f({QueryKind::marginal, {0, 1}, {}, {}}, 2);
    f.rebuild(b);
    CHECK(e.counts() == f.counts());
    CHECK(e.total() == 4);
    // A diff that disagrees with the tracked samples is rejected
    CHECK(error_of([&] { e.apply(sample_diff(a, b)); }) == Errc::diff_inconsistent);
}

TEST_CASE("query size limits")
{
    Query big{QueryKind::marginal, {0, 1, 2, 3}, {}, {}};
    CHECK(error_of([&] { Estimator(big, 2); }) == Errc::invalid_argument);
    CHECK_FALSE(error_of([&] { Estimator(big, 2, 4); }).has_value());
    Query bad{QueryKind::posterior, {0}, {1}, {}};
    CHECK(error_of([&] { Estimator(bad, 2); }) == Errc::invalid_argument);
}
}
