#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "chain_set.hpp"
#include "io.hpp"
#include "models.hpp"

namespace dyngibbs
{
//! Where the contraction gap comes from.
struct DeltaSource
{
    enum class Kind
    {
        given,  //!< fixed value
        check,  //!< exact influence row sums of each instance
        model,  //!< closed-form bound for a model family
    };
    Kind kind = Kind::given;
    double value = 0.5;
    ModelKind model = ModelKind::ising;
};

//! Parse "given:X", "check", or "model:ising|hardcore|coloring"
DeltaSource parse_delta(const std::string& text);

//! Chain parameters for an instance; throws regime_violation outside the regime
ChainParams resolve_params(const MrfInstance& inst, const DeltaSource& src,
                           std::uint64_t seed);

//! Throws regime_violation unless inst still meets the resolved gap
void check_regime(const MrfInstance& inst, const DeltaSource& src, const ChainParams& params);

struct RunConfig
{
    std::string instance_path;
    std::string updates_path;  //!< empty for no updates
    std::string schedule = "N=100,eps=0.01";
    DeltaSource delta;
    std::uint64_t seed = 0;
    std::string queries_path;  //!< empty for no queries
    std::string out_dir = ".";
    unsigned threads = 1;
    EdgeOrder edge_order = EdgeOrder::automatic;
    std::size_t baseline_every = 1;  //!< bench: time the baseline every k updates
};

//! Validated schedule; throws invalid_argument when bounded differences fail
ScheduleFns checked_schedule(const std::string& text, std::size_t n);

//---------------------------------------------------------------------------//
// Run
//---------------------------------------------------------------------------//

//! Maintain chains and estimates across the update stream
void run_stream(const MrfInstance& inst, const std::vector<UpdateBatch>& batches,
                const std::vector<Query>& queries, const ChainSet::Options& options,
                const DeltaSource& delta, std::ostream& estimates, std::ostream& samples);

//! Writes estimates.jsonl and samples.jsonl under out_dir
void cmd_run(const RunConfig& config);

//---------------------------------------------------------------------------//
// Bench
//---------------------------------------------------------------------------//

struct BenchStep
{
    std::size_t step = 0;
    double update_seconds = 0;
    std::optional<double> baseline_seconds;
    UpdateMetrics metrics;
    std::size_t sample_diff = 0;
    std::size_t chains = 0;
    Rank chain_length = 0;
};

struct BenchReport
{
    std::size_t n = 0;
    std::size_t chains = 0;
    Rank chain_length = 0;
    double init_seconds = 0;
    std::vector<BenchStep> steps;

    //! Total update time over total baseline time on the steps with a baseline
    double ratio() const;
    Json to_json() const;
};

//! Time every update and, every baseline_every steps, a full regeneration
BenchReport run_bench(const MrfInstance& inst, const std::vector<UpdateBatch>& batches,
                      const ChainSet::Options& options, std::size_t baseline_every = 1);

//! Ising torus with periodic batches of field changes and edge toggles
struct BenchWorkload
{
    MrfInstance instance;
    std::vector<UpdateBatch> batches;
};
BenchWorkload torus_workload(std::size_t side, double beta, std::size_t per_batch,
                             std::size_t num_batches, std::uint64_t seed);

//! Writes bench.json under out_dir; uses the torus workload with no instance
BenchReport cmd_bench(const RunConfig& config);

//! Exit status for an error code
int exit_code(Errc code);

}  // namespace dyngibbs
