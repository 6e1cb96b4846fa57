#pragma once

#include <cstdint>
#include <map>

namespace dyngibbs
{
using Histogram = std::map<std::uint64_t, std::uint64_t>;

struct ChiSquareResult
{
    double statistic = 0;
    std::size_t dof = 0;
    double p_value = 1;
};

/*!
 * Two-sample chi-square homogeneity test on outcome counts.
 *
 * Outcomes whose pooled count is below min_pooled are merged into one bin
 * so the asymptotic law is usable.
 */
ChiSquareResult two_sample_chi_square(const Histogram& a, const Histogram& b,
                                      std::uint64_t min_pooled = 10);

//! Upper tail of the chi-square law
double chi_square_sf(double statistic, double dof);

}  // namespace dyngibbs
