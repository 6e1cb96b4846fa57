#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "exec_log.hpp"
#include "gibbs.hpp"
#include "mrf.hpp"
#include "rng.hpp"

namespace dyngibbs
{
//! Per-vertex correction bound, ascending id, nonzero entries only.
using PbarMap = std::vector<std::pair<VertexId, double>>;

//! Ranks selected for a possible correction resample, ascending.
struct FilterSet
{
    std::vector<Rank> steps;
};

struct UpdateMetrics
{
    std::uint64_t r_ham = 0;          //!< steps revisited for potential changes
    std::uint64_t r_graph = 0;        //!< steps revisited for edge changes
    std::uint64_t filter_size = 0;    //!< size of the filter set
    std::uint64_t spins_changed = 0;  //!< transitions whose spin was rewritten
    std::uint64_t steps_inserted = 0;
    std::uint64_t steps_removed = 0;
    double time_ham = 0;  //!< seconds
    double time_edge = 0;
    double time_vertex = 0;
    double time_length = 0;
    bool regenerated = false;

    UpdateMetrics& operator+=(const UpdateMetrics& o);
};

//! Optional instrumentation of a replay loop
struct ReplayTrace
{
    std::vector<Rank> visited;          //!< ranks processed, in order
    std::vector<VertexId> disagreement; //!< final disagreement set, ascending
};

//! Call f(i) for each i in [0, m) independently with probability p
template<class F>
void bernoulli_skip(std::uint64_t m, double p, Rng& rng, F&& f)
{
    if (!(p > 0) || m == 0)
        return;
    if (p >= 1)
    {
        for (std::uint64_t i = 0; i < m; ++i)
            f(i);
        return;
    }
    const double denom = std::log1p(-p);
    std::uint64_t i = 0;
    while (true)
    {
        double gap = std::floor(std::log(rng.uniform_open0()) / denom);
        if (gap >= static_cast<double>(m - i))
            return;
        i += static_cast<std::uint64_t>(gap);
        f(i);
        if (++i >= m)
            return;
    }
}

//! Correction bounds for a potential-only change (same vertices and edges)
PbarMap compute_pbar(const MrfInstance& old_inst, const MrfInstance& new_inst);

//! Each step of vertex v joins with probability pbar[v]
FilterSet build_filter(const ExecutionLog& log, const PbarMap& pbar, Rng& rng);

//! Coupled replay for a potential change; old and new share the graph
UpdateMetrics update_hamiltonian(const MrfInstance& old_inst, const MrfInstance& new_inst,
                                 ExecutionLog& log, const FilterSet& filter, Rng& rng,
                                 ReplayTrace* trace = nullptr);

//! Coupled replay for an edge-set change; shared potentials must agree
UpdateMetrics update_edge(const MrfInstance& old_inst, const MrfInstance& new_inst,
                          ExecutionLog& log, Rng& rng, ReplayTrace* trace = nullptr);

//! Splice random steps of new isolated vertices into the log
UpdateMetrics add_vertices(const MrfInstance& before, const MrfInstance& after,
                           ExecutionLog& log, Rng& rng);

//! Drop isolated vertices and refill the log to its previous length
UpdateMetrics delete_vertices(const MrfInstance& before, const MrfInstance& after,
                              ExecutionLog& log, Rng& rng);

//---------------------------------------------------------------------------//
/*!
 * Instances visited while moving a chain from one instance to another.
 *
 * Potentials change first on the old graph, then new vertices arrive
 * isolated, then edges change (removals before additions when split), then
 * departing vertices leave, and finally the chain length is fixed.
 */
struct UpdatePlan
{
    MrfInstance source;
    MrfInstance mid;          //!< old graph, new potentials where defined
    MrfInstance grown;        //!< plus new isolated vertices
    MrfInstance pruned;       //!< edges only in the old graph removed
    MrfInstance rewired;      //!< new edge set
    MrfInstance target;
    PbarMap pbar;
    InstanceDiff diff;
    bool regenerate = false;  //!< finiteness of some potential changed
    bool split_edges = false;
    bool potentials_change = false;
    bool adds_vertices = false;
    bool changes_edges = false;
    bool deletes_vertices = false;
    Rank target_length = 0;
};

UpdatePlan plan_update(const MrfInstance& source, const MrfInstance& target,
                       Rank target_length, bool split_edges);

//! Run every phase of the plan on one chain
UpdateMetrics update_chain(const UpdatePlan& plan, ExecutionLog& log, Rng& rng,
                           const FilterSet* filter = nullptr);

enum class EdgeOrder
{
    automatic,     //!< split for hardcore-like instances
    joint,
    split,
};

//! Apply a batch to an instance and move one chain along with it
std::pair<MrfInstance, UpdateMetrics>
apply_update(const MrfInstance& inst, const UpdateBatch& batch, ExecutionLog& log,
             const ChainParams& params, Rng& rng, EdgeOrder order = EdgeOrder::automatic);

bool resolve_split(EdgeOrder order, const MrfInstance& a, const MrfInstance& b);

}  // namespace dyngibbs
