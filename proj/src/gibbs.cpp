#include "dyngibbs/gibbs.hpp"

#include <cmath>
#include <string>

namespace dyngibbs
{
Rank mixing_length(std::size_t n, const ChainParams& params)
{
    if (params.length_override)
        return *params.length_override;
    if (n == 0)
        return 0;
    if (!(params.delta > 0 && params.delta < 1))
        fail(Errc::invalid_argument, "delta must lie in (0, 1)");
    double eps = params.eps_fn(n);
    if (!(eps > 0 && eps < 1))
        fail(Errc::invalid_argument, "eps(n) must lie in (0, 1)");
    double nd = static_cast<double>(n);
    double t = params.scale * (nd / params.delta)
               * std::log(params.log_factor * nd / eps);
    double c = std::ceil(t);
    if (c > 4.0e9)
        fail(Errc::too_large, "mixing length exceeds 4e9 steps");
    return std::max<Rank>(1, static_cast<Rank>(c));
}

std::vector<std::pair<VertexId, Spin>> default_initial_state(const MrfInstance& inst)
{
    const int q = inst.q();
    const std::size_t n = inst.num_vertices();
    std::vector<int> state(n, -1);
    std::vector<std::pair<VertexId, Spin>> out;
    out.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i)
    {
        auto view = inst.local_at(i);
        auto idx = inst.neighbor_indices_at(i);
        int chosen = -1;
        for (int c = 0; c < q && chosen < 0; ++c)
        {
            double w = view.potential()[c];
            for (std::size_t k = 0; k < idx.size(); ++k)
            {
                if (state[idx[k]] >= 0)
                    w += (*view.neighbors()[k].potential)(state[idx[k]], c);
            }
            if (w != kNegInf)
                chosen = c;
        }
        if (chosen < 0)
            fail(Errc::infeasible_instance,
                 "no feasible start spin for vertex " + std::to_string(view.center()));
        state[i] = chosen;
        out.emplace_back(view.center(), static_cast<Spin>(chosen));
    }
    return out;
}

namespace
{
// Dense-array Glauber simulation; calls emit(i, spin) per step
template<class Emit>
std::vector<Spin> simulate(const MrfInstance& inst, Rank steps, Rng& rng, Emit&& emit)
{
    const std::size_t n = inst.num_vertices();
    auto init = default_initial_state(inst);
    std::vector<Spin> state(n);
    for (std::size_t i = 0; i < n; ++i)
        state[i] = init[i].second;
    if (n == 0)
        return state;
    std::vector<double> buf(inst.q());
    std::vector<Spin> nbr(inst.max_degree());
    for (Rank t = 0; t < steps; ++t)
    {
        auto i = static_cast<std::uint32_t>(rng.uniform_index(n));
        auto idx = inst.neighbor_indices_at(i);
        for (std::size_t k = 0; k < idx.size(); ++k)
            nbr[k] = state[idx[k]];
        inst.local_at(i).marginal(std::span<const Spin>(nbr.data(), idx.size()), buf);
        Spin c = sample_categorical(buf, rng.uniform01());
        state[i] = c;
        emit(i, c);
    }
    return state;
}
}  // namespace

void run_chain_into(const MrfInstance& inst, Rank steps, ExecutionLog& log, Rng& rng)
{
    std::vector<Transition> record;
    record.reserve(steps);
    simulate(inst, steps, rng, [&](std::uint32_t i, Spin c) {
        record.push_back({inst.id_at(i), c});
    });
    auto init = default_initial_state(inst);
    log.assign(init, record);
}

ExecutionLog run_chain(const MrfInstance& inst, const ChainParams& params, Rng& rng)
{
    ExecutionLog log;
    run_chain_into(inst, mixing_length(inst.num_vertices(), params), log, rng);
    return log;
}

ExecutionLog run_chain(const MrfInstance& inst, const ChainParams& params)
{
    Rng rng(params.seed, 0);
    return run_chain(inst, params, rng);
}

Configuration simulate_final(const MrfInstance& inst, Rank steps, Rng& rng)
{
    auto state = simulate(inst, steps, rng, [](std::uint32_t, Spin) {});
    Configuration out;
    for (std::size_t i = 0; i < state.size(); ++i)
        out.emplace_hint(out.end(), inst.id_at(static_cast<std::uint32_t>(i)), state[i]);
    return out;
}

void length_fix(const MrfInstance& inst, ExecutionLog& log, Rank new_length, Rng& rng)
{
    const Rank current = log.length();
    if (new_length <= current)
    {
        log.truncate(new_length);
        return;
    }
    const std::size_t n = inst.num_vertices();
    if (n == 0)
        fail(Errc::invalid_argument, "cannot extend a chain on an empty instance");
    if (log.num_vertices() != n)
        fail(Errc::vertex_set_mismatch, "log and instance vertex sets differ");
    std::vector<ExecutionLog::Slot> slot(n);
    for (std::uint32_t i = 0; i < n; ++i)
        slot[i] = log.slot_of(inst.id_at(i));
    std::vector<double> buf(inst.q());
    std::vector<Spin> nbr(inst.max_degree());
    for (Rank t = current; t < new_length; ++t)
    {
        auto i = static_cast<std::uint32_t>(rng.uniform_index(n));
        auto idx = inst.neighbor_indices_at(i);
        for (std::size_t k = 0; k < idx.size(); ++k)
            nbr[k] = log.final_in(slot[idx[k]]);
        inst.local_at(i).marginal(std::span<const Spin>(nbr.data(), idx.size()), buf);
        log.append(inst.id_at(i), sample_categorical(buf, rng.uniform01()));
    }
}

}  // namespace dyngibbs
