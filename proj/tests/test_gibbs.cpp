#include <doctest.h>

#include <cmath>

#include "dyngibbs/gibbs.hpp"
#include "dyngibbs/oracle.hpp"

using namespace dyngibbs;

TEST_SUITE("gibbs")
{
TEST_CASE("mixing length formula")
{
    ChainParams p;
    p.delta = 0.5;
    p.eps_fn = [](std::size_t) { return 0.01; };
    CHECK(mixing_length(100, p) == Rank(std::ceil(200 * std::log(100 / 0.01))));
    p.scale = 2;
    p.log_factor = 3;
    CHECK(mixing_length(100, p) == Rank(std::ceil(2 * 200 * std::log(300 / 0.01))));
    p.length_override = 7;
    CHECK(mixing_length(100, p) == 7);
    ChainParams bad;
    bad.delta = 1.0;
    CHECK_THROWS_AS(mixing_length(10, bad), Error);
    CHECK(mixing_length(0, ChainParams{}) == 0);
}

TEST_CASE("greedy start respects hard constraints")
{
    auto col = coloring_model(path_graph(4), 3);
    auto s = default_initial_state(col);
    REQUIRE(s.size() == 4);
    for (std::size_t i = 1; i < s.size(); ++i)
        CHECK(s[i].second != s[i - 1].second);
    auto hc = hardcore_model(cycle_graph(5), 1.0);
    for (auto& [v, c] : default_initial_state(hc))
        CHECK(c == 0);
}

TEST_CASE("reference chain is bit-exact with the fast simulator")
{
    auto inst = ising_model(cycle_graph(7), 0.35, 0.1);
    auto col = coloring_model(cycle_graph(6), 4);
    for (const auto* m : {&inst, &col})
    {
        for (std::uint64_t seed : {1u, 2u, 99u})
        {
            ChainParams p;
            p.seed = seed;
            p.length_override = 500;
            auto log = run_chain(*m, p);
            CHECK(log.length() == 500);
            CHECK(log.final_sample() == reference_chain(*m, 500, seed));
            Rng rng(seed, 0);
            CHECK(simulate_final(*m, 500, rng) == log.final_sample());
        }
    }
}

TEST_CASE("length fix truncates and extends")
{
    auto inst = ising_model(path_graph(4), 0.2);
    Rng rng(4, 1);
    ExecutionLog log;
    run_chain_into(inst, 100, log, rng);
    auto prefix = log.transitions();
    length_fix(inst, log, 40, rng);
    CHECK(log.length() == 40);
    length_fix(inst, log, 150, rng);
    CHECK(log.length() == 150);
    auto now = log.transitions();
    CHECK(std::equal(now.begin(), now.begin() + 40, prefix.begin()));
    CHECK(log.check_invariants());
}

TEST_CASE("long chains approach the Gibbs law")
{
    auto inst = ising_model(cycle_graph(4), 0.4, 0.2);
    auto exact = exact_gibbs(inst);
    std::vector<double> emp(exact.prob.size(), 0);
    const int reps = 40000;
    for (int i = 0; i < reps; ++i)
    {
        Rng rng(8, i);
        emp[exact.encode(simulate_final(inst, 60, rng))] += 1.0 / reps;
    }
    CHECK(tv_distance(emp, exact.prob) < 0.02);
}
}
