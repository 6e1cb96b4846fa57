#include <doctest.h>

#include <set>

#include "dyngibbs/chain_set.hpp"
#include "dyngibbs/models.hpp"

using namespace dyngibbs;

namespace
{
// Random batch over vertex ids 0..11 keeping degrees at most 3
UpdateBatch random_batch(const MrfInstance& inst, Rng& rng)
{
    UpdateBatch b;
    auto ids = inst.vertices();
    std::uint64_t kind = rng.uniform_index(5);
    if (kind == 0)
    {
        VertexId v = ids[rng.uniform_index(ids.size())];
        b.records.push_back(SetVertexPotential{v, ising_field(rng.uniform01() - 0.5)});
    }
    else if (kind == 1)
    {
        for (VertexId v = 0; v < 12; ++v)
            if (!inst.has_vertex(v))
            {
                b.records.push_back(AddVertex{v, ising_field(0.1)});
                VertexId u = ids[rng.uniform_index(ids.size())];
                if (inst.degree(u) < 3)
                    b.records.push_back(AddEdge{EdgeKey::of(u, v), ising_coupling(0.2)});
                break;
            }
    }
    else if (kind == 2 && ids.size() > 3)
    {
        VertexId v = ids[rng.uniform_index(ids.size())];
        for (auto& nb : inst.neighbors(v))
            b.records.push_back(DeleteEdge{EdgeKey::of(v, nb.id)});
        b.records.push_back(DeleteVertex{v});
    }
    else
    {
        VertexId u = ids[rng.uniform_index(ids.size())];
        VertexId v = ids[rng.uniform_index(ids.size())];
        if (u != v)
        {
            EdgeKey e = EdgeKey::of(u, v);
            if (inst.has_edge(e))
                b.records.push_back(DeleteEdge{e});
            else if (inst.degree(u) < 3 && inst.degree(v) < 3)
                b.records.push_back(AddEdge{e, ising_coupling(0.25)});
        }
    }
    return b;
}

ChainSet::Options small_options(unsigned threads)
{
    ChainSet::Options o;
    o.params.seed = 77;
    o.params.delta = 0.3;
    o.schedule = parse_schedule("N=1:1,eps=0.05");
    o.threads = threads;
    return o;
}
}  // namespace

TEST_SUITE("chain_set")
{
TEST_CASE("chain counts locate occurrences")
{
    ChainCounts c(5);
    std::vector<std::uint64_t> raw = {3, 0, 2, 5, 1};
    for (std::size_t i = 0; i < raw.size(); ++i)
        c.set(i, raw[i]);
    CHECK(c.total() == 11);
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < raw.size(); ++i)
        for (std::uint64_t j = 0; j < raw[i]; ++j, ++k)
            CHECK(c.locate(k) == std::pair<std::size_t, std::uint64_t>{i, j});
    c.resize(7);
    c.set(6, 4);
    CHECK(c.total() == 15);
    CHECK(c.locate(11) == std::pair<std::size_t, std::uint64_t>{6, 0});
    c.resize(2);
    CHECK(c.total() == 3);
}

TEST_CASE("diffs, index, and streams across random batches")
{
    ChainSet set(ising_model(cycle_graph(6), 0.2), small_options(1));
    CHECK(set.size() == 6);
    Rng rng(4, 0);
    std::set<std::uint64_t> streams;
    std::uint64_t max_stream = 0;
    for (std::size_t i = 0; i < set.size(); ++i)
    {
        streams.insert(set.stream_of(i));
        max_stream = std::max(max_stream, set.stream_of(i));
    }
    CHECK(streams.size() == set.size());
    CHECK(streams.count(0) == 0);
    for (int step = 0; step < 60; ++step)
    {
        auto before = set.samples();
        std::vector<std::uint64_t> old_streams;
        for (std::size_t i = 0; i < set.size(); ++i)
            old_streams.push_back(set.stream_of(i));
        auto batch = random_batch(set.instance(), rng);
        auto diff = set.apply(batch);
        auto after = set.samples();
        auto expect = sample_diff(before, after);
        CHECK(diff.chains_before == expect.chains_before);
        CHECK(diff.chains_after == expect.chains_after);
        REQUIRE(diff.entries.size() == expect.entries.size());
        for (std::size_t k = 0; k < diff.entries.size(); ++k)
        {
            CHECK(diff.entries[k].chain == expect.entries[k].chain);
            CHECK(diff.entries[k].vertex == expect.entries[k].vertex);
            CHECK(diff.entries[k].before == expect.entries[k].before);
            CHECK(diff.entries[k].after == expect.entries[k].after);
        }
        CHECK(set.check_index());
        CHECK(set.size() == set.instance().num_vertices());
        for (std::size_t i = 0; i < set.size(); ++i)
        {
            CHECK(set.log(i).length() == set.chain_length());
            if (i < old_streams.size())
                CHECK(set.stream_of(i) == old_streams[i]);
            else
                CHECK(set.stream_of(i) > max_stream);
        }
        for (std::size_t i = 0; i < set.size(); ++i)
            max_stream = std::max(max_stream, set.stream_of(i));
    }
}

TEST_CASE("thread count does not change the samples")
{
    ChainSet a(ising_model(cycle_graph(8), 0.2), small_options(1));
    ChainSet b(ising_model(cycle_graph(8), 0.2), small_options(3));
    Rng ra(9, 0), rb(9, 0);
    for (int step = 0; step < 15; ++step)
    {
        auto ba = random_batch(a.instance(), ra);
        auto bb = random_batch(b.instance(), rb);
        a.apply(ba);
        b.apply(bb);
        CHECK(a.samples() == b.samples());
    }
}

TEST_CASE("an emptied instance keeps empty chains")
{
    ChainSet::Options o = small_options(1);
    o.schedule = parse_schedule("N=4,eps=0.05");
    ChainSet set(ising_model(path_graph(2), 0.2), o);
    UpdateBatch b;
    b.records.push_back(DeleteEdge{EdgeKey::of(0, 1)});
    b.records.push_back(DeleteVertex{0});
    b.records.push_back(DeleteVertex{1});
    auto diff = set.apply(b);
    CHECK(set.chain_length() == 0);
    CHECK(diff.size() == 8);
    for (std::size_t i = 0; i < set.size(); ++i)
        CHECK(set.sample(i).empty());
    UpdateBatch c;
    c.records.push_back(AddVertex{5, ising_field(0.3)});
    set.apply(c);
    CHECK(set.chain_length() > 0);
    CHECK(set.check_index());
}

TEST_CASE("parallel_for forwards exceptions")
{
    std::vector<int> hit(50, 0);
    parallel_for(50, 4, [&](std::size_t i) { hit[i] = 1; });
    CHECK(std::count(hit.begin(), hit.end(), 1) == 50);
    CHECK_THROWS(parallel_for(10, 3, [](std::size_t i) {
        if (i == 7)
            throw std::runtime_error("boom");
    }));
}
}
