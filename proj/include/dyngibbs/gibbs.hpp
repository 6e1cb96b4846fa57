#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "exec_log.hpp"
#include "models.hpp"
#include "mrf.hpp"
#include "rng.hpp"

namespace dyngibbs
{
using Configuration = std::map<VertexId, Spin>;
using EpsFn = std::function<double(std::size_t)>;

//! Chain length parameters and seed.
struct ChainParams
{
    double delta = 0.5;
    EpsFn eps_fn = [](std::size_t) { return 0.01; };
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> length_override;
    double scale = 1.0;       //!< multiplies n / delta
    double log_factor = 1.0;  //!< multiplies n inside the log

    void apply(const MixingBound& b)
    {
        delta = b.delta;
        scale = b.scale;
        log_factor = b.log_factor;
    }
};

//! ceil(scale * (n / delta) * ln(log_factor * n / eps(n))), natural log
Rank mixing_length(std::size_t n, const ChainParams& params);

//! Greedy feasible start: ascending ids, first spin with positive weight
std::vector<std::pair<VertexId, Spin>> default_initial_state(const MrfInstance& inst);

//! Simulate a chain of mixing length and record its log
ExecutionLog run_chain(const MrfInstance& inst, const ChainParams& params, Rng& rng);
ExecutionLog run_chain(const MrfInstance& inst, const ChainParams& params);
//! Overwrite log with a fresh chain of the given length
void run_chain_into(const MrfInstance& inst, Rank steps, ExecutionLog& log, Rng& rng);

//! Simulate T steps from the default start without recording a log
Configuration simulate_final(const MrfInstance& inst, Rank steps, Rng& rng);

//! Truncate or extend with fresh steps so the log has new_length steps
void length_fix(const MrfInstance& inst, ExecutionLog& log, Rank new_length, Rng& rng);

//! Final configuration of the chain
inline Configuration extract_sample(const ExecutionLog& log)
{
    return log.final_sample();
}

}  // namespace dyngibbs
