#pragma once

#include <cstdint>
#include <vector>

#include "gibbs.hpp"
#include "mrf.hpp"

namespace dyngibbs
{
//---------------------------------------------------------------------------//
/*!
 * Exact Gibbs distribution of a small instance.
 *
 * Configurations are base-q integers over the vertices in ascending id
 * order, first vertex most significant.
 */
struct ExactDistribution
{
    int q = 2;
    std::vector<VertexId> vertices;
    std::vector<double> prob;

    std::uint64_t encode(const Configuration& c) const;
    Configuration decode(std::uint64_t code) const;
};

//! Enumerate every configuration; throws too_large beyond max_states
ExactDistribution exact_gibbs(const MrfInstance& inst, double max_states = 1e6);

//! Total variation distance; throws space_mismatch
double exact_tv(const ExactDistribution& p, const ExactDistribution& q);

//! Marginal law of the listed vertices, first vertex most significant
std::vector<double> exact_marginal(const ExactDistribution& dist,
                                   const std::vector<VertexId>& a);

//! Log-weight of a full configuration (sum of all potentials)
double log_weight(const MrfInstance& inst, const Configuration& c);

//! Straightforward map-based Glauber simulation on stream 0 of seed
Configuration reference_chain(const MrfInstance& inst, Rank steps, std::uint64_t seed);

}  // namespace dyngibbs
