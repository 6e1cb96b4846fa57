#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "dyngibbs/exec_log.hpp"
#include "dyngibbs/rng.hpp"

using namespace dyngibbs;

namespace
{
ExecutionLog small_log()
{
    ExecutionLog log;
    std::vector<std::pair<VertexId, Spin>> init = {{1, 0}, {2, 1}, {3, 0}};
    std::vector<Transition> steps = {{1, 1}, {2, 0}, {1, 0}, {3, 1}, {1, 1}};
    log.assign(init, steps);
    return log;
}
}  // namespace

TEST_SUITE("exec_log")
{
TEST_CASE("rank queries on a hand-built log")
{
    auto log = small_log();
    CHECK(log.length() == 5);
    CHECK(log.evaluate(0, 1) == 0);
    CHECK(log.evaluate(1, 1) == 1);
    CHECK(log.evaluate(3, 1) == 0);
    CHECK(log.evaluate(99, 1) == 1);
    CHECK(log.evaluate(1, 2) == 1);
    CHECK(log.evaluate(2, 2) == 0);
    CHECK(log.successor(0, 1) == Rank(1));
    CHECK(log.successor(1, 1) == Rank(3));
    CHECK(log.successor(5, 1) == std::nullopt);
    CHECK(log.at(4) == Transition{3, 1});
    CHECK(log.occurrences(1) == 3);
    CHECK(log.final_sample() == std::map<VertexId, Spin>{{1, 1}, {2, 0}, {3, 1}});
    CHECK(log.check_invariants());
}

TEST_CASE("edits keep ranks consistent")
{
    auto log = small_log();
    log.insert(1, 3, 1);
    CHECK(log.at(1) == Transition{3, 1});
    CHECK(log.at(2) == Transition{1, 1});
    log.remove(2);
    CHECK(log.length() == 5);
    CHECK(log.evaluate(2, 1) == 0);
    log.change(1, 0);
    CHECK(log.at(1).spin == 0);
    CHECK(log.remove_all(1) == 2);
    CHECK(log.occurrences(1) == 0);
    CHECK(log.final_spin(1) == 0);
    log.remove_vertex(1);
    CHECK_FALSE(log.has_vertex(1));
    log.truncate(1);
    CHECK(log.transitions() == std::vector<Transition>{{3, 0}});
    CHECK(log.check_invariants());
}

TEST_CASE("errors")
{
    auto log = small_log();
    CHECK(error_of([&] { log.remove(0); }) == Errc::rank_out_of_range);
    CHECK(error_of([&] { log.at(6); }) == Errc::rank_out_of_range);
    CHECK(error_of([&] { log.insert(7, 1, 0); }) == Errc::rank_out_of_range);
    CHECK(error_of([&] { log.evaluate(1, 42); }) == Errc::unknown_vertex);
    CHECK(error_of([&] { log.remove_vertex(1); }) == Errc::vertex_has_transitions);
    CHECK(error_of([&] { log.add_vertex_initial(2, 0); }) == Errc::invalid_argument);
}

TEST_CASE("cursor reads match rank reads")
{
    Rng rng(5, 0);
    ExecutionLog log;
    for (VertexId v = 0; v < 6; ++v)
        log.add_vertex_initial(v, 0);
    for (int i = 0; i < 400; ++i)
        log.insert(1 + rng.uniform_index(log.length() + 1), rng.uniform_index(6),
                   static_cast<Spin>(rng.uniform_index(3)));
    for (Rank t = 1; t <= log.length(); ++t)
    {
        auto x = log.step_at(t);
        REQUIRE(log.rank_of(x) == t);
        CHECK(log.vertex_of(x) == log.at(t).vertex);
        if (t > 1)
            CHECK(log.order_key(log.step_at(t - 1)) < log.order_key(x));
        for (VertexId v = 0; v < 6; ++v)
        {
            auto s = log.slot_of(v);
            CHECK(log.value_before(x, s) == log.evaluate(t - 1, v));
            auto nx = log.next_occurrence(x, s);
            auto succ = log.successor(t, v);
            CHECK((nx == ExecutionLog::npos) == !succ.has_value());
            if (succ)
                CHECK(log.rank_of(nx) == *succ);
        }
    }
    for (VertexId v = 0; v < 6; ++v)
    {
        auto s = log.slot_of(v);
        for (std::size_t k = 0; k < log.occurrences_in(s); ++k)
            CHECK(log.vertex_of(log.occurrence(s, k)) == v);
    }
    CHECK(log.check_invariants());
}

TEST_CASE("dense inserts force relabeling without breaking order")
{
    ExecutionLog log;
    log.add_vertex_initial(0, 0);
    log.add_vertex_initial(1, 0);
    log.append(0, 1);
    log.append(1, 1);
    // Always insert between the first two steps to exhaust the label gap
    for (int i = 0; i < 200; ++i)
        log.insert(2, i % 2, static_cast<Spin>(i % 3));
    CHECK(log.length() == 202);
    CHECK(log.check_invariants());
    for (Rank t = 2; t <= log.length(); ++t)
        CHECK(log.order_key(log.step_at(t - 1)) < log.order_key(log.step_at(t)));
}

TEST_CASE("change journal reports net changes")
{
    auto log = small_log();
    log.set_journaling(true);
    log.change(5, 0);  // vertex 1 final 1 -> 0
    log.change(5, 1);  // and back
    log.append(2, 1);  // vertex 2 final 0 -> 1, count 1 -> 2
    log.add_vertex_initial(9, 2);
    auto ch = log.take_changes();
    std::sort(ch.begin(), ch.end(),
              [](const auto& a, const auto& b) { return a.vertex < b.vertex; });
    std::map<VertexId, ExecutionLog::VertexChange> by;
    for (auto& c : ch)
        by[c.vertex] = c;
    REQUIRE(by.count(2));
    CHECK(by[2].final_before == Spin(0));
    CHECK(by[2].final_after == Spin(1));
    CHECK(by[2].count_after == 2);
    REQUIRE(by.count(9));
    CHECK_FALSE(by[9].final_before.has_value());
    CHECK(by[9].final_after == Spin(2));
    if (by.count(1))
        CHECK(by[1].final_before == by[1].final_after);
    CHECK(log.take_changes().empty());
}
}
