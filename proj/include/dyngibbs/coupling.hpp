#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mrf.hpp"
#include "rng.hpp"

namespace dyngibbs
{
struct CouplingOutcome
{
    Spin x;
    Spin y;
};

//! Draw (x, y) from the maximal coupling of mu and nu
CouplingOutcome maximal_couple(std::span<const double> mu,
                               std::span<const double> nu, Rng& rng);

//! Draw y given x under the same maximal coupling
Spin maximal_couple_conditional(std::span<const double> mu,
                                std::span<const double> nu, Spin x, Rng& rng);

/*!
 * Correction step for a potential change at one vertex.
 *
 * A spin drawn from the old conditional is kept with probability 1 - p[c]
 * and otherwise redrawn from nu; the result follows the new conditional.
 */
struct CorrectionKernel
{
    std::vector<double> p;
    std::optional<std::vector<double>> nu;
};

//! Correction kernel from the old and new conditionals at one boundary
CorrectionKernel correction_kernel(std::span<const double> mu_old,
                                   std::span<const double> mu_new);

CorrectionKernel correction_kernel(const LocalView& old_local,
                                   const LocalView& new_local,
                                   std::span<const Spin> tau);

//! Boundary-free upper bound on every correction probability
double p_up(const LocalView& old_local, const LocalView& new_local);

//! Throws neighbor_mismatch unless both views have the same neighbor ids
void check_same_neighbors(const LocalView& a, const LocalView& b);

}  // namespace dyngibbs
