#include <doctest.h>

#include <cmath>

#include "dyngibbs/models.hpp"
#include "dyngibbs/oracle.hpp"
#include "dyngibbs/stats.hpp"

using namespace dyngibbs;

TEST_SUITE("oracle")
{
TEST_CASE("two-spin Ising in closed form")
{
    const double beta = 0.7;
    auto inst = ising_model(path_graph(2), beta);
    auto d = exact_gibbs(inst);
    REQUIRE(d.prob.size() == 4);
    double z = 2 * std::exp(beta) + 2 * std::exp(-beta);
    CHECK(d.prob[0] == doctest::Approx(std::exp(beta) / z));
    CHECK(d.prob[1] == doctest::Approx(std::exp(-beta) / z));
    auto m = exact_marginal(d, {1});
    CHECK(m[0] == doctest::Approx(0.5));
    CHECK(log_weight(inst, {{0, 1}, {1, 1}}) == doctest::Approx(beta));
}

TEST_CASE("encoding puts the first vertex first")
{
    auto inst = coloring_model(path_graph(3), 3);
    auto d = exact_gibbs(inst);
    CHECK(d.encode({{0, 2}, {1, 0}, {2, 1}}) == 2 * 9 + 0 * 3 + 1);
    for (std::uint64_t k = 0; k < d.prob.size(); ++k)
        CHECK(d.encode(d.decode(k)) == k);
    // Proper colorings of a 3-path: 3 * 2 * 2
    int support = 0;
    for (double p : d.prob)
        support += p > 0;
    CHECK(support == 12);
}

TEST_CASE("tv and limits")
{
    auto a = exact_gibbs(ising_model(path_graph(3), 0.1));
    auto b = exact_gibbs(ising_model(path_graph(3), 0.1));
    CHECK(exact_tv(a, b) == 0.0);
    auto c = exact_gibbs(ising_model(path_graph(2), 0.1));
    CHECK_THROWS_AS(exact_tv(a, c), Error);
    CHECK_THROWS_AS(exact_gibbs(ising_model(path_graph(30), 0.1)), Error);
}
}

TEST_SUITE("stats")
{
TEST_CASE("chi-square tail")
{
    CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(chi_square_sf(18.307038053275146, 10) == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(chi_square_sf(0, 3) == 1.0);
}

TEST_CASE("two-sample test")
{
    Histogram a = {{0, 500}, {1, 300}, {2, 200}};
    auto same = two_sample_chi_square(a, a);
    CHECK(same.statistic == doctest::Approx(0));
    CHECK(same.dof == 2);
    CHECK(same.p_value == doctest::Approx(1));
    Histogram b = {{0, 200}, {1, 300}, {2, 500}};
    CHECK(two_sample_chi_square(a, b).p_value < 1e-10);
    // Rare outcomes pool into one bin
    Histogram c = {{0, 500}, {1, 300}, {2, 200}, {7, 1}, {8, 2}};
    CHECK(two_sample_chi_square(a, c).dof == 3);
}
}
