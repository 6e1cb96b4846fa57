#include "dyngibbs/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dyngibbs
{
namespace
{
constexpr double kNormTol = 1e-9;

void check_pair(std::span<const double> mu, std::span<const double> nu)
{
    if (mu.size() != nu.size() || mu.empty())
        fail(Errc::invalid_argument, "coupled vectors must have equal length");
    double smu = 0, snu = 0;
    for (std::size_t c = 0; c < mu.size(); ++c)
    {
        if (mu[c] < 0 || nu[c] < 0)
            fail(Errc::not_normalized, "negative probability");
        smu += mu[c];
        snu += nu[c];
    }
    if (std::fabs(smu - 1) > kNormTol || std::fabs(snu - 1) > kNormTol)
        fail(Errc::not_normalized, "probability vector does not sum to 1");
}

// Inverse-CDF draw proportional to nonnegative weights
Spin draw_weighted(std::span<const double> w, double total, double u)
{
    double target = u * total;
    double acc = 0;
    int last = -1;
    for (std::size_t c = 0; c < w.size(); ++c)
    {
        if (w[c] <= 0)
            continue;
        acc += w[c];
        last = static_cast<int>(c);
        if (target < acc)
            return static_cast<Spin>(c);
    }
    return static_cast<Spin>(last < 0 ? 0 : last);
}
}  // namespace

CouplingOutcome maximal_couple(std::span<const double> mu,
                               std::span<const double> nu, Rng& rng)
{
    check_pair(mu, nu);
    const std::size_t q = mu.size();
    std::vector<double> overlap(q), rx(q), ry(q);
    double so = 0;
    for (std::size_t c = 0; c < q; ++c)
    {
        overlap[c] = std::min(mu[c], nu[c]);
        rx[c] = mu[c] - overlap[c];
        ry[c] = nu[c] - overlap[c];
        so += overlap[c];
    }
    double srx = 0, sry = 0;
    for (std::size_t c = 0; c < q; ++c)
    {
        srx += rx[c];
        sry += ry[c];
    }
    if (rng.uniform01() < so || srx <= 0 || sry <= 0)
    {
        Spin c = draw_weighted(overlap, so, rng.uniform01());
        return {c, c};
    }
    Spin x = draw_weighted(rx, srx, rng.uniform01());
    Spin y = draw_weighted(ry, sry, rng.uniform01());
    return {x, y};
}

Spin maximal_couple_conditional(std::span<const double> mu,
                                std::span<const double> nu, Spin x, Rng& rng)
{
    check_pair(mu, nu);
    if (x >= mu.size())
        fail(Errc::invalid_argument, "spin out of range");
    if (!(mu[x] > 0))
        fail(Errc::zero_probability_condition, "conditioning spin has zero mass");
    double stay = std::min(mu[x], nu[x]) / mu[x];
    if (stay >= 1 || rng.uniform01() < stay)
        return x;
    const std::size_t q = mu.size();
    double residual[64];
    std::vector<double> big;
    double* r = residual;
    if (q > 64)
    {
        big.resize(q);
        r = big.data();
    }
    double total = 0;
    for (std::size_t c = 0; c < q; ++c)
    {
        r[c] = std::max(0.0, nu[c] - std::min(mu[c], nu[c]));
        total += r[c];
    }
    if (total <= 0)
        return x;
    return draw_weighted(std::span<const double>(r, q), total, rng.uniform01());
}

CorrectionKernel correction_kernel(std::span<const double> mu_old,
                                   std::span<const double> mu_new)
{
    if (mu_old.size() != mu_new.size())
        fail(Errc::invalid_argument, "conditionals differ in length");
    const std::size_t q = mu_old.size();
    CorrectionKernel k;
    k.p.assign(q, 0.0);
    bool identical = true;
    double gain = 0;
    std::vector<double> nu(q, 0.0);
    for (std::size_t c = 0; c < q; ++c)
    {
        if (mu_old[c] != mu_new[c])
            identical = false;
        if (mu_old[c] > 0 && mu_old[c] > mu_new[c])
            k.p[c] = (mu_old[c] - mu_new[c]) / mu_old[c];
        nu[c] = std::max(0.0, mu_new[c] - mu_old[c]);
        gain += nu[c];
    }
    if (!identical && gain > 0)
    {
        for (auto& x : nu)
            x /= gain;
        k.nu = std::move(nu);
    }
    return k;
}

void check_same_neighbors(const LocalView& a, const LocalView& b)
{
    if (a.center() != b.center() || a.degree() != b.degree() || a.q() != b.q())
        fail(Errc::neighbor_mismatch, "local views differ in shape");
    for (std::size_t k = 0; k < a.degree(); ++k)
    {
        if (a.neighbors()[k].id != b.neighbors()[k].id)
            fail(Errc::neighbor_mismatch, "local views differ in neighbors");
    }
}

CorrectionKernel correction_kernel(const LocalView& old_local,
                                   const LocalView& new_local,
                                   std::span<const Spin> tau)
{
    check_same_neighbors(old_local, new_local);
    auto mu = old_local.marginal(tau);
    auto mu2 = new_local.marginal(tau);
    return correction_kernel(mu, mu2);
}

double p_up(const LocalView& old_local, const LocalView& new_local)
{
    check_same_neighbors(old_local, new_local);
    double total = 0;
    if (&old_local.potential() != &new_local.potential())
        total += l1_log_distance(old_local.potential().weights(),
                                 new_local.potential().weights());
    for (std::size_t k = 0; k < old_local.degree(); ++k)
    {
        auto* a = old_local.neighbors()[k].potential;
        auto* b = new_local.neighbors()[k].potential;
        if (a != b)
            total += l1_log_distance(a->weights(), b->weights());
    }
    return std::min(1.0, 2.0 * total);
}

}  // namespace dyngibbs
