#include "dyngibbs/updater.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "dyngibbs/coupling.hpp"

namespace dyngibbs
{
namespace
{
using Clock = std::chrono::steady_clock;
using Step = ExecutionLog::Step;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool same_edge_set(const MrfInstance& a, const MrfInstance& b)
{
    if (a.num_edges() != b.num_edges())
        return false;
    auto ia = a.edges().begin();
    for (auto ib = b.edges().begin(); ib != b.edges().end(); ++ib, ++ia)
    {
        if (ia->first != ib->first)
            return false;
    }
    return true;
}

bool same_vertex_set(const MrfInstance& a, const MrfInstance& b)
{
    auto va = a.vertices();
    auto vb = b.vertices();
    return std::equal(va.begin(), va.end(), vb.begin(), vb.end());
}

//---------------------------------------------------------------------------//
/*
 * Coupled replay of a log under a local change.
 *
 * The log holds the old chain X. Steps at or before the frontier have been
 * rewritten to the new chain Y; later steps still hold X. A step is
 * revisited only if it is in the filter, touches the affected set, or
 * touches the closed neighborhood of the disagreement set; every other
 * step leaves X and Y in agreement and is skipped.
 */
class Replay
{
  public:
    enum class Mode
    {
        hamiltonian,
        edge,
    };

    Replay(const MrfInstance& old_inst, const MrfInstance& new_inst,
           ExecutionLog& log, Rng& rng, Mode mode, ReplayTrace* trace)
        : old_(old_inst), new_(new_inst), log_(log), rng_(rng), mode_(mode), trace_(trace)
    {
        const std::size_t q = old_inst.q();
        std::size_t deg = std::max(old_inst.max_degree(), new_inst.max_degree());
        sigma_.resize(deg);
        tau_.resize(deg);
        mu_x_.resize(q);
        mu_y_.resize(q);
        mu_new_.resize(q);
    }

    void set_affected(const std::vector<VertexId>& s)
    {
        for (VertexId v : s)
        {
            affected_.insert(v);
            this->push(log_.next_occurrence(ExecutionLog::npos, log_.slot_of(v)));
        }
    }

    void run(const std::vector<Step>& filter)
    {
        std::uint64_t frontier = 0;
        std::size_t fi = 0;
        while (true)
        {
            while (!heap_.empty() && heap_.top().key <= frontier)
                heap_.pop();
            bool has_heap = !heap_.empty();
            bool has_filter = fi < filter.size();
            if (!has_heap && !has_filter)
                break;
            Step x;
            bool in_filter = false;
            if (has_filter
                && (!has_heap || log_.order_key(filter[fi]) <= heap_.top().key))
            {
                x = filter[fi++];
                in_filter = true;
            }
            else
            {
                x = heap_.top().step;
            }
            const std::uint64_t key = log_.order_key(x);
            while (!heap_.empty() && heap_.top().key == key)
                heap_.pop();
            this->process(x, in_filter);
            frontier = key;
        }
        if (trace_)
        {
            trace_->disagreement.clear();
            for (auto& [v, s] : disagree_)
                trace_->disagreement.push_back(v);
            std::sort(trace_->disagreement.begin(), trace_->disagreement.end());
        }
    }

    std::uint64_t events() const { return events_; }
    std::uint64_t changed() const { return changed_; }

  private:
    struct Entry
    {
        std::uint64_t key;
        Step step;
        bool operator>(const Entry& o) const { return key > o.key; }
    };

    const MrfInstance& old_;
    const MrfInstance& new_;
    ExecutionLog& log_;
    Rng& rng_;
    Mode mode_;
    ReplayTrace* trace_;

    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
    std::unordered_map<VertexId, Spin> disagree_;  // old-chain spins on D
    std::unordered_map<VertexId, int> cover_;      // multiplicity in N+(D)
    std::unordered_set<VertexId> affected_;
    std::vector<Spin> sigma_, tau_;
    std::vector<double> mu_x_, mu_y_, mu_new_;
    std::uint64_t events_ = 0;
    std::uint64_t changed_ = 0;

    void push(Step x)
    {
        if (x != ExecutionLog::npos)
            heap_.push({log_.order_key(x), x});
    }

    // Fill tau with new-chain spins before step x; return the count
    std::size_t gather_new(const LocalView& view, Step x)
    {
        auto nbrs = view.neighbors();
        for (std::size_t k = 0; k < nbrs.size(); ++k)
            tau_[k] = log_.value_before(x, log_.slot_of(nbrs[k].id));
        return nbrs.size();
    }

    // Fill sigma (old chain) and tau (new chain); true if they differ
    bool gather_both(const LocalView& view, Step x)
    {
        auto nbrs = view.neighbors();
        bool differ = false;
        for (std::size_t k = 0; k < nbrs.size(); ++k)
        {
            Spin y = log_.value_before(x, log_.slot_of(nbrs[k].id));
            tau_[k] = y;
            auto it = disagree_.find(nbrs[k].id);
            sigma_[k] = it == disagree_.end() ? y : it->second;
            differ = differ || sigma_[k] != y;
        }
        return differ;
    }

    void update_cover(VertexId w, Step x, int delta)
    {
        auto bump = [&](VertexId u) {
            if (delta > 0)
            {
                if (++cover_[u] == 1 && u != w)
                    this->push(log_.next_occurrence(x, log_.slot_of(u)));
            }
            else
            {
                auto it = cover_.find(u);
                if (--it->second == 0)
                    cover_.erase(it);
            }
        };
        bump(w);
        for (auto& nb : old_.neighbors(w))
            bump(nb.id);
    }

    void process(Step x, bool in_filter)
    {
        const VertexId w = log_.vertex_of(x);
        const bool in_affected = affected_.count(w) != 0;
        if (!in_filter && !in_affected && cover_.count(w) == 0)
            return;  // stale queue entry
        ++events_;
        if (trace_)
            trace_->visited.push_back(log_.rank_of(x));

        const Spin xs = log_.spin_of(x);
        Spin ys = xs;
        if (in_affected)
        {
            // Fresh draw from the new conditional, independent of the old chain
            auto view = new_.local(w);
            std::size_t d = this->gather_new(view, x);
            view.marginal(std::span<const Spin>(tau_.data(), d), mu_new_);
            ys = sample_categorical(mu_new_, rng_.uniform01());
        }
        else
        {
            auto view = old_.local(w);
            const std::size_t d = view.degree();
            std::span<const Spin> sigma(sigma_.data(), d), tau(tau_.data(), d);
            bool differ = this->gather_both(view, x);
            if (differ)
            {
                view.marginal(sigma, mu_x_);
                view.marginal(tau, mu_y_);
                ys = maximal_couple_conditional(mu_x_, mu_y_, xs, rng_);
            }
            if (in_filter && mode_ == Mode::hamiltonian)
            {
                if (!differ)
                    view.marginal(tau, mu_y_);
                auto nview = new_.local(w);
                nview.marginal(tau, mu_new_);
                double p = mu_y_[ys] > mu_new_[ys]
                               ? (mu_y_[ys] - mu_new_[ys]) / mu_y_[ys]
                               : 0.0;
                if (p > 0)
                {
                    double bound = p_up(view, nview);
                    if (rng_.uniform01() * bound < p)
                    {
                        auto kernel = correction_kernel(mu_y_, mu_new_);
                        if (kernel.nu)
                            ys = sample_categorical(*kernel.nu, rng_.uniform01());
                    }
                }
            }
        }

        if (ys != xs)
        {
            log_.set_spin(x, ys);
            ++changed_;
        }
        const bool was = disagree_.count(w) != 0;
        const bool now = ys != xs;
        if (now)
        {
            disagree_[w] = xs;
            if (!was)
                this->update_cover(w, x, +1);
        }
        else if (was)
        {
            disagree_.erase(w);
            this->update_cover(w, x, -1);
        }
        if (in_affected || cover_.count(w) != 0)
            this->push(log_.next_occurrence(x, log_.slot_of_step(x)));
    }
};

std::vector<Step> filter_steps(const ExecutionLog& log, const FilterSet& filter)
{
    std::vector<Step> steps;
    steps.reserve(filter.steps.size());
    Rank prev = 0;
    for (Rank t : filter.steps)
    {
        if (t <= prev || t > log.length())
            fail(Errc::invalid_argument, "filter ranks must be ascending and in range");
        steps.push_back(log.step_at(t));
        prev = t;
    }
    return steps;
}

UpdateMetrics hamiltonian_impl(const MrfInstance& old_inst, const MrfInstance& new_inst,
                               ExecutionLog& log, const FilterSet& filter, Rng& rng,
                               ReplayTrace* trace)
{
    auto start = Clock::now();
    UpdateMetrics m;
    m.filter_size = filter.steps.size();
    Replay replay(old_inst, new_inst, log, rng, Replay::Mode::hamiltonian, trace);
    replay.run(filter_steps(log, filter));
    m.r_ham = replay.events();
    m.spins_changed = replay.changed();
    m.time_ham = seconds_since(start);
    return m;
}

std::vector<VertexId> edge_endpoints(const MrfInstance& a, const MrfInstance& b)
{
    std::vector<VertexId> s;
    auto ia = a.edges().begin();
    auto ib = b.edges().begin();
    while (ia != a.edges().end() || ib != b.edges().end())
    {
        if (ib == b.edges().end() || (ia != a.edges().end() && ia->first < ib->first))
        {
            s.push_back(ia->first.lo);
            s.push_back(ia->first.hi);
            ++ia;
        }
        else if (ia == a.edges().end() || ib->first < ia->first)
        {
            s.push_back(ib->first.lo);
            s.push_back(ib->first.hi);
            ++ib;
        }
        else
        {
            ++ia;
            ++ib;
        }
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

UpdateMetrics edge_impl(const MrfInstance& old_inst, const MrfInstance& new_inst,
                        ExecutionLog& log, Rng& rng, ReplayTrace* trace)
{
    auto start = Clock::now();
    UpdateMetrics m;
    auto affected = edge_endpoints(old_inst, new_inst);
    if (!affected.empty())
    {
        Replay replay(old_inst, new_inst, log, rng, Replay::Mode::edge, trace);
        replay.set_affected(affected);
        replay.run({});
        m.r_graph = replay.events();
        m.spins_changed = replay.changed();
    }
    else if (trace)
    {
        trace->disagreement.clear();
    }
    m.time_edge = seconds_since(start);
    return m;
}

std::vector<VertexId> vertex_difference(const MrfInstance& a, const MrfInstance& b)
{
    std::vector<VertexId> out;
    auto va = a.vertices();
    auto vb = b.vertices();
    std::set_difference(va.begin(), va.end(), vb.begin(), vb.end(), std::back_inserter(out));
    return out;
}

Spin first_feasible_spin(const VertexPotential& phi)
{
    for (std::size_t c = 0; c < phi.size(); ++c)
        if (phi[c] != kNegInf)
            return static_cast<Spin>(c);
    fail(Errc::infeasible_instance, "vertex potential forbids every spin");
}

UpdateMetrics add_impl(const MrfInstance& before, const MrfInstance& after,
                       ExecutionLog& log, Rng& rng)
{
    auto start = Clock::now();
    UpdateMetrics m;
    auto fresh = vertex_difference(after, before);
    if (fresh.empty())
        return m;
    const Rank total = log.length();
    const double share = double(fresh.size()) / double(after.num_vertices());
    std::vector<Rank> ranks;
    bernoulli_skip(total, share, rng, [&](std::uint64_t i) { ranks.push_back(i + 1); });

    length_fix(before, log, total - ranks.size(), rng);
    m.steps_removed = ranks.size();
    for (VertexId v : fresh)
        log.add_vertex_initial(v, first_feasible_spin(after.vertex_potential(v)));
    std::vector<double> marg(after.q());
    for (Rank r : ranks)
    {
        VertexId v = fresh[rng.uniform_index(fresh.size())];
        auto view = after.local(v);
        view.marginal({}, marg);
        log.insert(r, v, sample_categorical(marg, rng.uniform01()));
    }
    m.steps_inserted = ranks.size();
    m.time_vertex = seconds_since(start);
    return m;
}

UpdateMetrics delete_impl(const MrfInstance& before, const MrfInstance& after,
                          ExecutionLog& log, Rng& rng)
{
    auto start = Clock::now();
    UpdateMetrics m;
    auto gone = vertex_difference(before, after);
    if (gone.empty())
        return m;
    const Rank total = log.length();
    for (VertexId v : gone)
    {
        m.steps_removed += log.remove_all(v);
        log.remove_vertex(v);
    }
    Rank refill = after.num_vertices() == 0 ? 0 : total;
    m.steps_inserted = refill - log.length();
    length_fix(after, log, refill, rng);
    m.time_vertex = seconds_since(start);
    return m;
}

void check_isolated(const MrfInstance& inst, const std::vector<VertexId>& vs)
{
    for (VertexId v : vs)
    {
        if (inst.degree(v) != 0)
            fail(Errc::not_isolated, "vertex " + std::to_string(v) + " has edges");
    }
}
}  // namespace

//---------------------------------------------------------------------------//
UpdateMetrics& UpdateMetrics::operator+=(const UpdateMetrics& o)
{
    r_ham += o.r_ham;
    r_graph += o.r_graph;
    filter_size += o.filter_size;
    spins_changed += o.spins_changed;
    steps_inserted += o.steps_inserted;
    steps_removed += o.steps_removed;
    time_ham += o.time_ham;
    time_edge += o.time_edge;
    time_vertex += o.time_vertex;
    time_length += o.time_length;
    regenerated = regenerated || o.regenerated;
    return *this;
}

PbarMap compute_pbar(const MrfInstance& old_inst, const MrfInstance& new_inst)
{
    if (!same_vertex_set(old_inst, new_inst) || !same_edge_set(old_inst, new_inst))
        fail(Errc::graph_mismatch, "potential-only change must keep the graph");
    PbarMap out;
    for (std::uint32_t i = 0; i < old_inst.num_vertices(); ++i)
    {
        double p = p_up(old_inst.local_at(i), new_inst.local_at(i));
        if (p > 0)
            out.emplace_back(old_inst.id_at(i), p);
    }
    return out;
}

FilterSet build_filter(const ExecutionLog& log, const PbarMap& pbar, Rng& rng)
{
    FilterSet f;
    for (auto& [v, p] : pbar)
    {
        auto slot = log.slot_of(v);
        bernoulli_skip(log.occurrences_in(slot), p, rng, [&](std::uint64_t k) {
            f.steps.push_back(log.rank_of(log.occurrence(slot, k)));
        });
    }
    std::sort(f.steps.begin(), f.steps.end());
    return f;
}

UpdateMetrics update_hamiltonian(const MrfInstance& old_inst, const MrfInstance& new_inst,
                                 ExecutionLog& log, const FilterSet& filter, Rng& rng,
                                 ReplayTrace* trace)
{
    if (old_inst.q() != new_inst.q())
        fail(Errc::domain_mismatch, "spin domains differ");
    if (!same_vertex_set(old_inst, new_inst) || !same_edge_set(old_inst, new_inst))
        fail(Errc::graph_mismatch, "potential update must keep vertices and edges");
    return hamiltonian_impl(old_inst, new_inst, log, filter, rng, trace);
}

UpdateMetrics update_edge(const MrfInstance& old_inst, const MrfInstance& new_inst,
                          ExecutionLog& log, Rng& rng, ReplayTrace* trace)
{
    if (old_inst.q() != new_inst.q())
        fail(Errc::domain_mismatch, "spin domains differ");
    if (!same_vertex_set(old_inst, new_inst))
        fail(Errc::vertex_set_mismatch, "edge update must keep the vertex set");
    for (auto& [id, phi] : old_inst.vertex_map())
    {
        if (!(*phi == new_inst.vertex_potential(id)))
            fail(Errc::shared_potential_mismatch,
                 "vertex " + std::to_string(id) + " potential differs");
    }
    for (auto& [key, phi] : old_inst.edges())
    {
        auto* other = new_inst.edge_potential(key);
        if (other && !(*phi == *other))
            fail(Errc::shared_potential_mismatch, "shared edge potential differs");
    }
    return edge_impl(old_inst, new_inst, log, rng, trace);
}

UpdateMetrics add_vertices(const MrfInstance& before, const MrfInstance& after,
                           ExecutionLog& log, Rng& rng)
{
    if (!vertex_difference(before, after).empty())
        fail(Errc::vertex_set_mismatch, "vertex addition cannot remove vertices");
    check_isolated(after, vertex_difference(after, before));
    return add_impl(before, after, log, rng);
}

UpdateMetrics delete_vertices(const MrfInstance& before, const MrfInstance& after,
                              ExecutionLog& log, Rng& rng)
{
    if (!vertex_difference(after, before).empty())
        fail(Errc::vertex_set_mismatch, "vertex deletion cannot add vertices");
    check_isolated(before, vertex_difference(before, after));
    return delete_impl(before, after, log, rng);
}

//---------------------------------------------------------------------------//
UpdatePlan plan_update(const MrfInstance& source, const MrfInstance& target,
                       Rank target_length, bool split_edges)
{
    if (source.q() != target.q())
        fail(Errc::domain_mismatch, "spin domains differ");
    const int q = source.q();
    UpdatePlan p;
    p.source = source;
    p.target = target;
    p.target_length = target_length;
    p.diff = instance_diff(source, target);

    MrfInstance::VertexMap mid_v;
    for (auto& [id, phi] : source.vertex_map())
    {
        auto it = target.vertex_map().find(id);
        mid_v.emplace_hint(mid_v.end(), id, it != target.vertex_map().end() ? it->second : phi);
    }
    MrfInstance::EdgeMap mid_e;
    for (auto& [key, phi] : source.edges())
    {
        auto it = target.edges().find(key);
        mid_e.emplace_hint(mid_e.end(), key, it != target.edges().end() ? it->second : phi);
    }
    p.mid = MrfInstance::build(q, mid_v, mid_e);
    double mid_ham = instance_diff(source, p.mid).d_ham;
    p.regenerate = std::isinf(mid_ham);
    p.potentials_change = mid_ham > 0;

    MrfInstance::VertexMap grown_v = mid_v;
    for (auto& [id, phi] : target.vertex_map())
        grown_v.emplace(id, phi);
    p.adds_vertices = grown_v.size() > mid_v.size();
    p.grown = p.adds_vertices ? MrfInstance::build(q, grown_v, mid_e) : p.mid;

    p.changes_edges = !same_edge_set(p.grown, target);
    p.split_edges = split_edges && p.changes_edges;
    if (p.changes_edges)
    {
        p.rewired = MrfInstance::build(q, grown_v, target.edges());
        if (p.split_edges)
        {
            MrfInstance::EdgeMap kept;
            for (auto& [key, phi] : target.edges())
                if (mid_e.count(key))
                    kept.emplace_hint(kept.end(), key, phi);
            p.pruned = MrfInstance::build(q, grown_v, kept);
        }
    }
    else
    {
        p.rewired = p.grown;
    }
    p.deletes_vertices = grown_v.size() > target.num_vertices();
    if (p.potentials_change && !p.regenerate)
        p.pbar = compute_pbar(source, p.mid);
    return p;
}

UpdateMetrics update_chain(const UpdatePlan& plan, ExecutionLog& log, Rng& rng,
                           const FilterSet* filter)
{
    UpdateMetrics m;
    if (plan.regenerate)
    {
        auto start = Clock::now();
        run_chain_into(plan.target, plan.target_length, log, rng);
        m.regenerated = true;
        m.time_length = seconds_since(start);
        return m;
    }
    if (plan.potentials_change)
    {
        FilterSet own;
        if (!filter)
        {
            own = build_filter(log, plan.pbar, rng);
            filter = &own;
        }
        m += hamiltonian_impl(plan.source, plan.mid, log, *filter, rng, nullptr);
    }
    if (plan.adds_vertices)
        m += add_impl(plan.mid, plan.grown, log, rng);
    if (plan.changes_edges)
    {
        if (plan.split_edges)
        {
            m += edge_impl(plan.grown, plan.pruned, log, rng, nullptr);
            m += edge_impl(plan.pruned, plan.rewired, log, rng, nullptr);
        }
        else
        {
            m += edge_impl(plan.grown, plan.rewired, log, rng, nullptr);
        }
    }
    if (plan.deletes_vertices)
        m += delete_impl(plan.rewired, plan.target, log, rng);

    auto start = Clock::now();
    Rank before = log.length();
    if (plan.target.num_vertices() == 0)
        log.truncate(0);
    else
        length_fix(plan.target, log, plan.target_length, rng);
    if (log.length() > before)
        m.steps_inserted += log.length() - before;
    else
        m.steps_removed += before - log.length();
    m.time_length += seconds_since(start);
    return m;
}

bool resolve_split(EdgeOrder order, const MrfInstance& a, const MrfInstance& b)
{
    switch (order)
    {
        case EdgeOrder::joint: return false;
        case EdgeOrder::split: return true;
        case EdgeOrder::automatic: return is_hardcore_like(a) || is_hardcore_like(b);
    }
    return false;
}

std::pair<MrfInstance, UpdateMetrics>
apply_update(const MrfInstance& inst, const UpdateBatch& batch, ExecutionLog& log,
             const ChainParams& params, Rng& rng, EdgeOrder order)
{
    MrfInstance target = apply_batch(inst, batch);
    Rank length = mixing_length(target.num_vertices(), params);
    auto plan = plan_update(inst, target, length, resolve_split(order, inst, target));
    auto metrics = update_chain(plan, log, rng);
    return {std::move(target), metrics};
}

}  // namespace dyngibbs
