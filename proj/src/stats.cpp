#include "dyngibbs/stats.hpp"

#include <cmath>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "dyngibbs/error.hpp"

namespace dyngibbs
{
double chi_square_sf(double statistic, double dof)
{
    if (dof <= 0)
        return 1.0;
    if (statistic <= 0)
        return 1.0;
    return boost::math::gamma_q(dof / 2, statistic / 2);
}

ChiSquareResult two_sample_chi_square(const Histogram& a, const Histogram& b,
                                      std::uint64_t min_pooled)
{
    double na = 0;
    double nb = 0;
    for (auto& [k, c] : a)
        na += static_cast<double>(c);
    for (auto& [k, c] : b)
        nb += static_cast<double>(c);
    if (na == 0 || nb == 0)
        fail(Errc::invalid_argument, "both samples must be nonempty");

    std::vector<std::pair<double, double>> bins;
    std::pair<double, double> pool{0, 0};
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end())
    {
        double x = 0;
        double y = 0;
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first))
            x = static_cast<double>((ia++)->second);
        else if (ia == a.end() || ib->first < ia->first)
            y = static_cast<double>((ib++)->second);
        else
        {
            x = static_cast<double>((ia++)->second);
            y = static_cast<double>((ib++)->second);
        }
        if (x + y < static_cast<double>(min_pooled))
        {
            pool.first += x;
            pool.second += y;
        }
        else
        {
            bins.emplace_back(x, y);
        }
    }
    if (pool.first + pool.second > 0)
        bins.push_back(pool);

    const double ka = std::sqrt(nb / na);
    const double kb = std::sqrt(na / nb);
    ChiSquareResult r;
    for (auto& [x, y] : bins)
    {
        double d = ka * x - kb * y;
        r.statistic += d * d / (x + y);
    }
    r.dof = bins.empty() ? 0 : bins.size() - 1;
    r.p_value = chi_square_sf(r.statistic, static_cast<double>(r.dof));
    return r;
}

}  // namespace dyngibbs
