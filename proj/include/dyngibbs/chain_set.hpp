#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "exec_log.hpp"
#include "gibbs.hpp"
#include "inference.hpp"
#include "mrf.hpp"
#include "rng.hpp"
#include "updater.hpp"

namespace dyngibbs
{
//! Per-chain occurrence counts of one vertex with prefix-sum search.
class ChainCounts
{
  public:
    explicit ChainCounts(std::size_t chains = 0);

    std::size_t size() const { return raw_.size(); }
    std::uint64_t total() const { return total_; }
    std::uint64_t at(std::size_t chain) const { return raw_[chain]; }
    void set(std::size_t chain, std::uint64_t count);
    void resize(std::size_t chains);

    //! Chain holding the k-th occurrence overall and the index within it
    std::pair<std::size_t, std::uint64_t> locate(std::uint64_t k) const;

  private:
    std::vector<std::uint64_t> raw_;
    std::vector<std::uint64_t> tree_;
    std::uint64_t total_ = 0;
    void rebuild();
};

//---------------------------------------------------------------------------//
/*!
 * N independent chains tracking one dynamic instance.
 *
 * Chain i draws from its own stream (stream ids start at 1 and are never
 * reused); stream 0 drives the shared filter preparation. A per-vertex
 * count index over chains lets the filter for every chain be drawn with one
 * Bernoulli pass per vertex.
 */
class ChainSet
{
  public:
    struct Options
    {
        ChainParams params;
        ScheduleFns schedule;
        EdgeOrder edge_order = EdgeOrder::automatic;
        unsigned threads = 1;
    };

    ChainSet(MrfInstance inst, Options options);

    const MrfInstance& instance() const { return inst_; }
    const Options& options() const { return opts_; }
    std::size_t size() const { return chains_.size(); }
    Rank chain_length() const { return length_; }
    const ExecutionLog& log(std::size_t i) const { return chains_[i].log; }
    std::uint64_t stream_of(std::size_t i) const { return chains_[i].rng.stream(); }
    Configuration sample(std::size_t i) const { return chains_[i].log.final_sample(); }
    std::vector<Configuration> samples() const;

    //! Move every chain to the updated instance; returns the sample diff
    SampleDiff apply(const UpdateBatch& batch);
    //! Same, given the target instance directly
    SampleDiff apply_to(const MrfInstance& target);

    //! Metrics summed over chains for the last update
    const UpdateMetrics& last_metrics() const { return metrics_; }
    //! Per-chain metrics for the last update
    const std::vector<UpdateMetrics>& chain_metrics() const { return per_chain_; }

    //! Audit the count index against the logs
    bool check_index() const;

  private:
    struct Chain
    {
        ExecutionLog log;
        Rng rng;
    };

    MrfInstance inst_;
    Options opts_;
    Rank length_ = 0;
    std::vector<Chain> chains_;
    std::unordered_map<VertexId, ChainCounts> index_;
    Rng prep_;
    std::uint64_t next_stream_ = 1;
    UpdateMetrics metrics_;
    std::vector<UpdateMetrics> per_chain_;

    void index_chain(std::size_t i);
    std::vector<FilterSet> prepare_filters(const UpdatePlan& plan);
};

//! Run f(i) for i in [0, n) over up to threads workers
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f);

}  // namespace dyngibbs
