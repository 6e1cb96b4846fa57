#include <doctest.h>

#include <algorithm>
#include <set>

#include "support.hpp"
#include "dyngibbs/oracle.hpp"
#include "dyngibbs/stats.hpp"
#include "dyngibbs/updater.hpp"

using namespace dyngibbs;

namespace
{
std::set<VertexId> final_disagreement(const ExecutionLog& a, const ExecutionLog& b)
{
    std::set<VertexId> out;
    for (auto& [v, s] : a.final_sample())
        if (b.final_spin(v) != s)
            out.insert(v);
    return out;
}

// Ranks whose spin differs between two logs over the same steps
std::vector<Rank> rewritten(const ExecutionLog& a, const ExecutionLog& b)
{
    std::vector<Rank> out;
    auto ta = a.transitions(), tb = b.transitions();
    REQUIRE(ta.size() == tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i)
    {
        REQUIRE(ta[i].vertex == tb[i].vertex);
        if (ta[i].spin != tb[i].spin)
            out.push_back(i + 1);
    }
    return out;
}

bool subset(const std::vector<Rank>& small, std::vector<Rank> big)
{
    std::sort(big.begin(), big.end());
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}
}  // namespace

TEST_SUITE("updater")
{
TEST_CASE("bernoulli skip selects each index with probability p")
{
    Rng rng(1, 0);
    std::vector<int> hits(20, 0);
    const int reps = 20000;
    for (int r = 0; r < reps; ++r)
        bernoulli_skip(20, 0.15, rng, [&](std::uint64_t i) { ++hits[i]; });
    for (int h : hits)
        CHECK(double(h) / reps == doctest::Approx(0.15).epsilon(0.06));
    int all = 0, none = 0;
    bernoulli_skip(7, 1.0, rng, [&](std::uint64_t) { ++all; });
    bernoulli_skip(7, 0.0, rng, [&](std::uint64_t) { ++none; });
    CHECK(all == 7);
    CHECK(none == 0);
}

TEST_CASE("pbar is nonzero only where the local law moved")
{
    auto a = ising_model(path_graph(5), 0.3, 0.0);
    UpdateBatch b;
    b.records.push_back(SetVertexPotential{2, ising_field(0.4)});
    b.records.push_back(SetEdgePotential{EdgeKey::of(3, 4), ising_coupling(0.1)});
    auto c = apply_batch(a, b);
    auto pbar = compute_pbar(a, c);
    std::set<VertexId> ids;
    for (auto& [v, p] : pbar)
    {
        ids.insert(v);
        CHECK(p > 0);
        CHECK(p <= 1);
    }
    CHECK(ids == std::set<VertexId>{2, 3, 4});
    CHECK(compute_pbar(a, a).empty());
    CHECK_THROWS_AS(compute_pbar(a, ising_model(cycle_graph(5), 0.3)), Error);
}

TEST_CASE("filter with probability one takes every step of the vertex")
{
    auto inst = ising_model(path_graph(3), 0.2);
    Rng rng(3, 1);
    ExecutionLog log;
    run_chain_into(inst, 200, log, rng);
    auto f = build_filter(log, {{1, 1.0}}, rng);
    CHECK(f.steps.size() == log.occurrences(1));
    for (Rank t : f.steps)
        CHECK(log.at(t).vertex == 1);
    CHECK(std::is_sorted(f.steps.begin(), f.steps.end()));
}

TEST_CASE("replays touch only what they visit and report the final disagreement")
{
    Rng gen(21, 0);
    for (int trial = 0; trial < 40; ++trial)
    {
        auto g = random_bounded_degree_graph(12, 3, 14, gen);
        auto a = ising_model(g, 0.25, 0.05);
        Rng rng(21, 100 + trial);
        ExecutionLog log;
        run_chain_into(a, 300, log, rng);
        const ExecutionLog old = log;

        UpdateBatch hb;
        hb.records.push_back(SetVertexPotential{gen.uniform_index(12), ising_field(0.8)});
        auto b = apply_batch(a, hb);
        auto filter = build_filter(log, compute_pbar(a, b), rng);
        ReplayTrace trace;
        auto m = update_hamiltonian(a, b, log, filter, rng, &trace);
        CHECK(m.r_ham == trace.visited.size());
        CHECK(m.r_graph == 0);
        CHECK(std::is_sorted(trace.visited.begin(), trace.visited.end()));
        CHECK(subset(filter.steps, trace.visited));
        auto changed = rewritten(old, log);
        CHECK(m.spins_changed == changed.size());
        CHECK(subset(changed, trace.visited));
        auto d = final_disagreement(old, log);
        CHECK(std::set<VertexId>(trace.disagreement.begin(), trace.disagreement.end()) == d);
        CHECK(log.check_invariants());

        // Edge toggle on the updated instance
        const ExecutionLog mid = log;
        VertexId u = gen.uniform_index(12), v = (u + 1 + gen.uniform_index(11)) % 12;
        EdgeKey e = EdgeKey::of(u, v);
        UpdateBatch eb;
        if (b.has_edge(e))
            eb.records.push_back(DeleteEdge{e});
        else
            eb.records.push_back(AddEdge{e, ising_coupling(0.3)});
        auto c = apply_batch(b, eb);
        ReplayTrace et;
        auto me = update_edge(b, c, log, rng, &et);
        CHECK(me.r_ham == 0);
        CHECK(me.r_graph == et.visited.size());
        changed = rewritten(mid, log);
        CHECK(subset(changed, et.visited));
        // The first visit of each endpoint is its first step
        for (VertexId x : {u, v})
            if (mid.occurrences(x) > 0)
                CHECK(std::find(et.visited.begin(), et.visited.end(), *mid.successor(0, x))
                      != et.visited.end());
        d = final_disagreement(mid, log);
        CHECK(std::set<VertexId>(et.disagreement.begin(), et.disagreement.end()) == d);
    }
}

TEST_CASE("unchanged instances leave the log alone")
{
    auto a = ising_model(cycle_graph(6), 0.3);
    Rng rng(5, 0);
    ExecutionLog log;
    run_chain_into(a, 200, log, rng);
    auto before = log.transitions();
    FilterSet empty;
    auto m = update_hamiltonian(a, a, log, empty, rng);
    CHECK(m.r_ham == 0);
    m = update_edge(a, a, log, rng);
    CHECK(m.r_graph == 0);
    CHECK(log.transitions() == before);
}

TEST_CASE("precondition errors")
{
    auto a = ising_model(path_graph(4), 0.3);
    Rng rng(6, 0);
    ExecutionLog log;
    run_chain_into(a, 50, log, rng);
    FilterSet f;
    auto other = ising_model(cycle_graph(4), 0.3);
    CHECK(error_of([&] { update_hamiltonian(a, other, log, f, rng); }) == Errc::graph_mismatch);
    auto moved = ising_model(path_graph(4), 0.3, 0.5);
    CHECK(error_of([&] { update_edge(a, moved, log, rng); }) == Errc::shared_potential_mismatch);
    UpdateBatch add;
    add.records.push_back(AddVertex{9, ising_field(0)});
    add.records.push_back(AddEdge{EdgeKey::of(0, 9), ising_coupling(0.1)});
    auto grown = apply_batch(a, add);
    CHECK(error_of([&] { add_vertices(a, grown, log, rng); }) == Errc::not_isolated);
    CHECK(error_of([&] { delete_vertices(grown, a, log, rng); }) == Errc::not_isolated);
    f.steps = {3, 2};
    auto b = ising_model(path_graph(4), 0.4);
    CHECK(error_of([&] { update_hamiltonian(a, b, log, f, rng); }) == Errc::invalid_argument);
}

TEST_CASE("vertex add and delete keep the length and vertex set")
{
    auto a = ising_model(path_graph(3), 0.3);
    Rng rng(7, 0);
    ExecutionLog log;
    run_chain_into(a, 90, log, rng);
    UpdateBatch add;
    add.records.push_back(AddVertex{10, ising_field(0.2)});
    add.records.push_back(AddVertex{11, ising_field(-0.2)});
    auto b = apply_batch(a, add);
    auto m = add_vertices(a, b, log, rng);
    CHECK(log.length() == 90);
    CHECK(log.num_vertices() == 5);
    CHECK(m.steps_inserted > 0);
    CHECK(log.check_invariants());
    UpdateBatch del;
    del.records.push_back(DeleteVertex{10});
    auto c = apply_batch(b, del);
    delete_vertices(b, c, log, rng);
    CHECK(log.length() == 90);
    CHECK_FALSE(log.has_vertex(10));
    CHECK(log.check_invariants());
}

TEST_CASE("plan phases")
{
    auto a = hardcore_model(path_graph(4), 0.5);
    UpdateBatch b;
    b.records.push_back(SetVertexPotential{0, hardcore_vertex(1.0)});
    b.records.push_back(DeleteEdge{EdgeKey::of(2, 3)});
    b.records.push_back(DeleteVertex{3});
    b.records.push_back(AddVertex{8, hardcore_vertex(0.3)});
    b.records.push_back(AddEdge{EdgeKey::of(0, 8), hardcore_edge()});
    auto t = apply_batch(a, b);
    auto p = plan_update(a, t, 100, resolve_split(EdgeOrder::automatic, a, t));
    CHECK(p.potentials_change);
    CHECK_FALSE(p.regenerate);
    CHECK(p.adds_vertices);
    CHECK(p.changes_edges);
    CHECK(p.split_edges);
    CHECK(p.deletes_vertices);
    CHECK(p.grown.num_vertices() == 5);
    CHECK(p.pruned.num_edges() == 2);
    CHECK(p.rewired.num_edges() == 3);

    // Forbidding a spin changes finiteness and forces regeneration
    UpdateBatch hard;
    hard.records.push_back(SetVertexPotential{1, VertexPotential({0.0, kNegInf})});
    auto h = apply_batch(a, hard);
    auto ph = plan_update(a, h, 100, false);
    CHECK(ph.regenerate);
    ExecutionLog log;
    Rng rng(9, 0);
    run_chain_into(a, 100, log, rng);
    auto m = update_chain(ph, log, rng);
    CHECK(m.regenerated);
    CHECK(log.length() == 100);
    for (auto& tr : log.transitions())
        if (tr.vertex == 1)
            CHECK(tr.spin == 0);
}

TEST_CASE("split and joint edge orders both preserve the law")
{
    auto a = hardcore_model(cycle_graph(4), 0.7);
    UpdateBatch b;
    b.records.push_back(DeleteEdge{EdgeKey::of(0, 1)});
    b.records.push_back(AddEdge{EdgeKey::of(0, 2), hardcore_edge()});
    auto t = apply_batch(a, b);
    ChainParams params;
    params.length_override = 30;
    ExactDistribution space = exact_gibbs(t);
    for (EdgeOrder order : {EdgeOrder::split, EdgeOrder::joint})
    {
        Histogram upd, fresh;
        for (int i = 0; i < 20000; ++i)
        {
            Rng r1(12, i);
            auto log = run_chain(a, params, r1);
            apply_update(a, b, log, params, r1, order);
            ++upd[space.encode(log.final_sample())];
            Rng r2(13, i);
            ++fresh[space.encode(simulate_final(t, 30, r2))];
        }
        CHECK(two_sample_chi_square(upd, fresh).p_value > 1e-3);
    }
}
}
