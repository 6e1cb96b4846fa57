#include <doctest.h>

#include <cmath>

#include "dyngibbs/coupling.hpp"
#include "dyngibbs/models.hpp"

using namespace dyngibbs;

TEST_SUITE("coupling")
{
TEST_CASE("maximal coupling has the right marginals and overlap")
{
    std::vector<double> mu = {0.5, 0.3, 0.2}, nu = {0.2, 0.3, 0.5};
    Rng rng(11, 0);
    const int reps = 200000;
    std::vector<double> fx(3), fy(3);
    int equal = 0;
    for (int i = 0; i < reps; ++i)
    {
        auto o = maximal_couple(mu, nu, rng);
        fx[o.x] += 1.0 / reps;
        fy[o.y] += 1.0 / reps;
        equal += o.x == o.y;
    }
    for (int c = 0; c < 3; ++c)
    {
        CHECK(fx[c] == doctest::Approx(mu[c]).epsilon(0.02));
        CHECK(fy[c] == doctest::Approx(nu[c]).epsilon(0.02));
    }
    // P(x == y) = 1 - TV = 0.7
    CHECK(double(equal) / reps == doctest::Approx(0.7).epsilon(0.01));
}

TEST_CASE("conditional coupling keeps shared mass")
{
    std::vector<double> mu = {0.5, 0.5, 0.0}, nu = {0.5, 0.0, 0.5};
    Rng rng(2, 0);
    for (int i = 0; i < 1000; ++i)
        CHECK(maximal_couple_conditional(mu, nu, 0, rng) == 0);
    for (int i = 0; i < 1000; ++i)
        CHECK(maximal_couple_conditional(mu, nu, 1, rng) == 2);
    CHECK_THROWS_AS(maximal_couple_conditional(mu, nu, 2, rng), Error);
    std::vector<double> bad = {0.5, 0.6, 0.0};
    CHECK_THROWS_AS(maximal_couple(bad, nu, rng), Error);
}

TEST_CASE("correction kernel recovers the new law")
{
    std::vector<double> mu_old = {0.6, 0.3, 0.1}, mu_new = {0.2, 0.3, 0.5};
    auto k = correction_kernel(mu_old, mu_new);
    double moved = 0;
    for (int c = 0; c < 3; ++c)
        moved += mu_old[c] * k.p[c];
    REQUIRE(k.nu.has_value());
    for (int c = 0; c < 3; ++c)
        CHECK(mu_old[c] * (1 - k.p[c]) + moved * (*k.nu)[c] == doctest::Approx(mu_new[c]));
    auto same = correction_kernel(mu_old, mu_old);
    for (double p : same.p)
        CHECK(p == 0.0);
}

TEST_CASE("p_up bounds every boundary for a field change")
{
    auto a = ising_model(cycle_graph(4), 0.3, 0.1);
    auto b = ising_model(cycle_graph(4), 0.3, 0.6);
    auto va = a.local(0), vb = b.local(0);
    double bound = p_up(va, vb);
    CHECK(bound > 0);
    CHECK(bound <= 1);
    for (Spin x = 0; x < 2; ++x)
        for (Spin y = 0; y < 2; ++y)
        {
            std::vector<Spin> tau = {x, y};
            auto k = correction_kernel(va, vb, tau);
            for (double p : k.p)
                CHECK(p <= bound + 1e-15);
        }
    auto c = ising_model(path_graph(4), 0.3, 0.6);
    CHECK_THROWS_AS(check_same_neighbors(va, c.local(0)), Error);
}
}
