#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "dyngibbs/models.hpp"
#include "dyngibbs/mrf.hpp"

using namespace dyngibbs;

TEST_SUITE("mrf")
{
TEST_CASE("edge keys are normalized")
{
    auto e = EdgeKey::of(9, 2);
    CHECK(e.lo == 2);
    CHECK(e.hi == 9);
    CHECK(e == EdgeKey::of(2, 9));
    CHECK(error_of([] { EdgeKey::of(3, 3); }) == Errc::invalid_argument);
}

TEST_CASE("build validates potentials")
{
    VertexPotential flat({0.0, 0.0});
    CHECK(error_of([] { EdgePotential(2, {0, 1, 2}); }) == Errc::bad_arity);
    CHECK(error_of([] { EdgePotential(2, {0, 1, 2, 0}); }) == Errc::asymmetric_edge);
    CHECK(error_of([&] {
              MrfInstance::build(2, {{0, flat}}, {{EdgeKey{0, 1}, ising_coupling(0.1)}});
          })
          == Errc::invalid_argument);
    CHECK(error_of([&] { MrfInstance::build(2, {{0, VertexPotential({0.0, 0.0, 0.0})}}, {}); })
          == Errc::bad_arity);
    CHECK(error_of([&] { MrfInstance::build(2, {{0, flat}, {0, flat}}, {}); })
          == Errc::invalid_argument);
}

TEST_CASE("instance topology")
{
    auto inst = ising_model(cycle_graph(5), 0.3);
    CHECK(inst.num_vertices() == 5);
    CHECK(inst.num_edges() == 5);
    CHECK(inst.max_degree() == 2);
    auto nb = inst.neighbors(0);
    REQUIRE(nb.size() == 2);
    CHECK(nb[0].id == 1);
    CHECK(nb[1].id == 4);
    CHECK(inst.has_edge(EdgeKey::of(4, 0)));
    CHECK(inst.edge_potential(EdgeKey::of(0, 2)) == nullptr);
    CHECK(error_of([&] { inst.index_of(17); }) == Errc::unknown_vertex);
}

TEST_CASE("conditional marginal matches a hand computation")
{
    const double beta = 0.4, h = 0.25;
    auto inst = ising_model(path_graph(3), beta, h);
    // Vertex 1 with neighbors at +1 and -1: only the field survives
    auto p = conditional_marginal(inst, 1, {{0, 1}, {2, 0}});
    CHECK(p[1] == doctest::Approx(1 / (1 + std::exp(-2 * h))));
    // Both neighbors at +1
    p = conditional_marginal(inst, 1, {{0, 1}, {2, 1}});
    CHECK(p[1] == doctest::Approx(1 / (1 + std::exp(-2 * (h + 2 * beta)))));
    CHECK(error_of([&] { conditional_marginal(inst, 1, {{0, 1}}); }) == Errc::missing_boundary);
}

TEST_CASE("normalization handles forbidden spins")
{
    std::vector<double> w = {kNegInf, std::log(1.0), std::log(3.0)};
    normalize_log_weights(w);
    CHECK(w[0] == 0.0);
    CHECK(w[1] == doctest::Approx(0.25));
    CHECK(w[2] == doctest::Approx(0.75));
    std::vector<double> none = {kNegInf, kNegInf};
    CHECK(error_of([&] { normalize_log_weights(none); }) == Errc::infeasible_neighborhood);
}

TEST_CASE("log distance and instance diff")
{
    std::vector<double> a = {0.0, 1.0}, b = {0.5, 0.0}, c = {kNegInf, 1.0};
    CHECK(l1_log_distance(a, b) == doctest::Approx(1.5));
    CHECK(std::isinf(l1_log_distance(a, c)));
    CHECK(l1_log_distance(c, c) == 0.0);

    auto x = ising_model(path_graph(3), 0.2, 0.0);
    UpdateBatch batch;
    batch.records.push_back(SetVertexPotential{1, ising_field(0.5)});
    batch.records.push_back(DeleteEdge{EdgeKey::of(1, 2)});
    batch.records.push_back(AddVertex{5, ising_field(0.0)});
    auto y = apply_batch(x, batch);
    auto d = instance_diff(x, y);
    CHECK(d.d_graph == 2.0);
    CHECK(d.d_ham == doctest::Approx(1.0));  // |-0.5| + |0.5|
    CHECK(d.d_total == doctest::Approx(3.0));
    CHECK(instance_diff(y, x).d_total == doctest::Approx(3.0));
}

TEST_CASE("batches are checked in order")
{
    auto x = ising_model(path_graph(3), 0.2);
    auto run = [&](UpdateRecord r) {
        UpdateBatch b;
        b.records.push_back(std::move(r));
        return error_of([&] { apply_batch(x, b); });
    };
    CHECK(run(AddVertex{0, ising_field(0)}) == Errc::invalid_batch);
    CHECK(run(DeleteVertex{1}) == Errc::invalid_batch);
    CHECK(run(DeleteEdge{EdgeKey::of(0, 2)}) == Errc::invalid_batch);
    CHECK(run(AddEdge{EdgeKey::of(0, 1), ising_coupling(1)}) == Errc::invalid_batch);
    CHECK(run(AddEdge{EdgeKey::of(0, 9), ising_coupling(1)}) == Errc::invalid_batch);
    CHECK(run(SetVertexPotential{0, VertexPotential({1.0})}) == Errc::bad_arity);

    UpdateBatch ok;
    ok.records.push_back(DeleteEdge{EdgeKey::of(1, 2)});
    ok.records.push_back(DeleteVertex{2});
    auto y = apply_batch(x, ok);
    CHECK(y.num_vertices() == 2);
    CHECK(x.num_vertices() == 3);
}

TEST_CASE("feasibility detects a locked coloring")
{
    auto ok = coloring_model(cycle_graph(4), 3);
    CHECK_FALSE(validate_feasibility(ok).has_value());
    auto bad = coloring_model(complete_graph(4), 3);
    auto v = validate_feasibility(bad);
    REQUIRE(v.has_value());
    CHECK(v->boundary.size() == 3);
}

TEST_CASE("influence row sums for zero-field Ising")
{
    const double beta = 0.2;
    auto sigmoid = [](double x) { return 1 / (1 + std::exp(-x)); };
    // One neighbor alone: the flip moves the law by tanh(beta)
    auto pair = dobrushin_check(ising_model(path_graph(2), beta));
    CHECK(pair.row_sums[0] == doctest::Approx(std::tanh(beta)));
    // With a second neighbor the worst boundary puts the field at its edge
    auto rep = dobrushin_check(ising_model(cycle_graph(6), beta));
    const double each = sigmoid(4 * beta) - 0.5;
    for (double s : rep.row_sums)
        CHECK(s == doctest::Approx(2 * each));
    CHECK(2 * each <= 2 * std::tanh(beta));
    CHECK(rep.delta == doctest::Approx(1 - 2 * each));
    CHECK(rep.satisfied);
    CHECK(error_of([&] { dobrushin_check(ising_model(complete_graph(6), 0.1), 4); })
          == Errc::degree_too_large);
}

TEST_CASE("categorical draws and tv")
{
    std::vector<double> p = {0.2, 0.0, 0.8};
    CHECK(sample_categorical(p, 0.0) == 0);
    CHECK(sample_categorical(p, 0.19) == 0);
    CHECK(sample_categorical(p, 0.2) == 2);
    CHECK(sample_categorical(p, 0.999999) == 2);
    std::vector<double> q = {0.5, 0.5, 0.0};
    CHECK(tv_distance(p, q) == doctest::Approx(0.8));
}
}
