#include "dyngibbs/chain_set.hpp"

#include <algorithm>
#include <tuple>
#include <thread>

namespace dyngibbs
{
ChainCounts::ChainCounts(std::size_t chains) : raw_(chains, 0), tree_(chains, 0) {}

void ChainCounts::set(std::size_t chain, std::uint64_t count)
{
    const std::uint64_t old = raw_[chain];
    if (old == count)
        return;
    raw_[chain] = count;
    total_ = total_ - old + count;
    for (std::size_t i = chain + 1; i <= tree_.size(); i += i & (~i + 1))
        tree_[i - 1] = tree_[i - 1] - old + count;
}

void ChainCounts::resize(std::size_t chains)
{
    raw_.resize(chains, 0);
    this->rebuild();
}

void ChainCounts::rebuild()
{
    tree_.assign(raw_.size(), 0);
    total_ = 0;
    for (std::size_t i = 1; i <= raw_.size(); ++i)
    {
        tree_[i - 1] += raw_[i - 1];
        total_ += raw_[i - 1];
        std::size_t parent = i + (i & (~i + 1));
        if (parent <= raw_.size())
            tree_[parent - 1] += tree_[i - 1];
    }
}

std::pair<std::size_t, std::uint64_t> ChainCounts::locate(std::uint64_t k) const
{
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 <= tree_.size())
        step *= 2;
    for (; step > 0; step /= 2)
    {
        if (pos + step <= tree_.size() && tree_[pos + step - 1] <= k)
        {
            pos += step;
            k -= tree_[pos - 1];
        }
    }
    return {pos, k};
}

//---------------------------------------------------------------------------//
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f)
{
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (threads <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t)
    {
        pool.emplace_back([&, t] {
            try
            {
                for (std::size_t i = t; i < n; i += threads)
                    f(i);
            }
            catch (...)
            {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

//---------------------------------------------------------------------------//
ChainSet::ChainSet(MrfInstance inst, Options options)
    : inst_(std::move(inst)), opts_(std::move(options)), prep_(opts_.params.seed, 0)
{
    auto eps = opts_.schedule.eps;
    opts_.params.eps_fn = [eps](std::size_t n) { return eps(n); };
    length_ = mixing_length(inst_.num_vertices(), opts_.params);
    const std::size_t n_chains = opts_.schedule.samples(inst_.num_vertices());
    chains_.resize(n_chains);
    for (std::size_t i = 0; i < n_chains; ++i)
        chains_[i].rng = Rng(opts_.params.seed, next_stream_ + i);
    next_stream_ += n_chains;
    parallel_for(n_chains, opts_.threads, [&](std::size_t i) {
        run_chain_into(inst_, length_, chains_[i].log, chains_[i].rng);
        chains_[i].log.set_journaling(true);
    });
    for (VertexId v : inst_.vertices())
        index_.emplace(v, ChainCounts(n_chains));
    for (std::size_t i = 0; i < n_chains; ++i)
        this->index_chain(i);
}

void ChainSet::index_chain(std::size_t i)
{
    const auto& log = chains_[i].log;
    for (VertexId v : log.vertex_ids())
        index_.at(v).set(i, log.occurrences(v));
}

std::vector<Configuration> ChainSet::samples() const
{
    std::vector<Configuration> out;
    out.reserve(chains_.size());
    for (const auto& c : chains_)
        out.push_back(c.log.final_sample());
    return out;
}

std::vector<FilterSet> ChainSet::prepare_filters(const UpdatePlan& plan)
{
    std::vector<FilterSet> filters(chains_.size());
    for (auto& [v, p] : plan.pbar)
    {
        const auto& counts = index_.at(v);
        bernoulli_skip(counts.total(), p, prep_, [&](std::uint64_t k) {
            auto [i, j] = counts.locate(k);
            const auto& log = chains_[i].log;
            filters[i].steps.push_back(log.rank_of(log.occurrence(log.slot_of(v), j)));
        });
    }
    for (auto& f : filters)
        std::sort(f.steps.begin(), f.steps.end());
    return filters;
}

SampleDiff ChainSet::apply(const UpdateBatch& batch)
{
    return this->apply_to(apply_batch(inst_, batch));
}

SampleDiff ChainSet::apply_to(const MrfInstance& target)
{
    SampleDiff diff;
    diff.chains_before = chains_.size();
    const Rank new_length = mixing_length(target.num_vertices(), opts_.params);
    const std::size_t n_target = opts_.schedule.samples(target.num_vertices());

    // Completion, removal side: drop surplus chains before doing work on them
    std::vector<DiffEntry> removed;
    while (chains_.size() > n_target)
    {
        auto chain = static_cast<std::uint32_t>(chains_.size() - 1);
        for (auto& [v, s] : chains_.back().log.final_sample())
        {
            removed.push_back({chain, v, s, std::nullopt});
            index_.at(v).set(chain, 0);
        }
        chains_.pop_back();
    }
    if (chains_.size() < diff.chains_before)
        for (auto& [v, counts] : index_)
            counts.resize(chains_.size());

    auto plan = plan_update(inst_, target, new_length,
                            resolve_split(opts_.edge_order, inst_, target));
    std::vector<FilterSet> filters;
    if (plan.potentials_change && !plan.regenerate)
        filters = this->prepare_filters(plan);

    per_chain_.assign(chains_.size(), UpdateMetrics{});
    std::vector<std::vector<ExecutionLog::VertexChange>> changes(chains_.size());
    parallel_for(chains_.size(), opts_.threads, [&](std::size_t i) {
        auto& c = chains_[i];
        const FilterSet* f = filters.empty() ? nullptr : &filters[i];
        per_chain_[i] = update_chain(plan, c.log, c.rng, f);
        changes[i] = c.log.take_changes();
        std::sort(changes[i].begin(), changes[i].end(),
                  [](const auto& x, const auto& y) { return x.vertex < y.vertex; });
    });

    for (VertexId v : target.vertices())
        if (!index_.count(v))
            index_.emplace(v, ChainCounts(chains_.size()));
    metrics_ = UpdateMetrics{};
    for (std::size_t i = 0; i < chains_.size(); ++i)
    {
        metrics_ += per_chain_[i];
        for (const auto& ch : changes[i])
        {
            if (ch.final_before != ch.final_after)
                diff.entries.push_back(
                    {static_cast<std::uint32_t>(i), ch.vertex, ch.final_before, ch.final_after});
            if (ch.count_before != ch.count_after)
            {
                auto it = index_.find(ch.vertex);
                if (it != index_.end())
                    it->second.set(i, ch.count_after);
            }
        }
    }
    for (auto it = index_.begin(); it != index_.end();)
        it = target.has_vertex(it->first) ? std::next(it) : index_.erase(it);

    // Completion, addition side: fresh chains on new streams
    const std::size_t kept = chains_.size();
    if (n_target > kept)
    {
        for (auto& [v, counts] : index_)
            counts.resize(n_target);
        std::vector<Chain> fresh(n_target - kept);
        for (auto& c : fresh)
            c.rng = Rng(opts_.params.seed, next_stream_++);
        parallel_for(fresh.size(), opts_.threads, [&](std::size_t j) {
            run_chain_into(target, new_length, fresh[j].log, fresh[j].rng);
            fresh[j].log.set_journaling(true);
        });
        for (auto& c : fresh)
            chains_.push_back(std::move(c));
        for (std::size_t i = kept; i < n_target; ++i)
        {
            this->index_chain(i);
            for (auto& [v, s] : chains_[i].log.final_sample())
                diff.entries.push_back({static_cast<std::uint32_t>(i), v, std::nullopt, s});
        }
    }
    diff.entries.insert(diff.entries.end(), removed.begin(), removed.end());
    std::sort(diff.entries.begin(), diff.entries.end(), [](const auto& x, const auto& y) {
        return std::tie(x.chain, x.vertex) < std::tie(y.chain, y.vertex);
    });
    diff.chains_after = chains_.size();
    inst_ = target;
    length_ = new_length;
    return diff;
}

bool ChainSet::check_index() const
{
    if (index_.size() != inst_.num_vertices())
        return false;
    for (auto& [v, counts] : index_)
    {
        if (counts.size() != chains_.size())
            return false;
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < chains_.size(); ++i)
        {
            if (counts.at(i) != chains_[i].log.occurrences(v))
                return false;
            total += counts.at(i);
        }
        if (total != counts.total())
            return false;
        for (std::uint64_t k = 0; k < total; k += std::max<std::uint64_t>(1, total / 64))
        {
            auto [i, j] = counts.locate(k);
            std::uint64_t before = 0;
            for (std::size_t c = 0; c < i; ++c)
                before += counts.at(c);
            if (i >= chains_.size() || before + j != k || j >= counts.at(i))
                return false;
        }
    }
    return true;
}

}  // namespace dyngibbs
