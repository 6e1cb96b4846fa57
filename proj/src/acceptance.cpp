#include "dyngibbs/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>

#include "dyngibbs/chain_set.hpp"
#include "dyngibbs/coupling.hpp"
#include "dyngibbs/harness.hpp"
#include "dyngibbs/oracle.hpp"
#include "dyngibbs/stats.hpp"

namespace dyngibbs
{
namespace
{
using Clock = std::chrono::steady_clock;

// Pinned thresholds
constexpr std::size_t kLogOps = 100000;
constexpr double kLogSeconds = 30.0;
constexpr std::size_t kKernelCases = 200;
constexpr double kKernelTol = 1e-12;
constexpr std::size_t kLawReps = 100000;
constexpr double kLawAlpha = 0.01;
constexpr double kLawSeconds = 600.0;
constexpr double kTvEps = 0.05;
constexpr std::size_t kTvChains = 20000;
constexpr std::size_t kTvBatches = 20;
constexpr double kCostC = 50.0;
constexpr double kFilterC = 4.0;
constexpr double kSpeedupTarget = 0.2;
constexpr std::size_t kRegimeInstances = 50;
constexpr double kRegimeBand = 1e-9;
constexpr std::size_t kDiffTrials = 1000;

std::string fmt(double x, int prec = 4)
{
    std::ostringstream s;
    s << std::setprecision(prec) << x;
    return s.str();
}

//---------------------------------------------------------------------------//
// 1. Execution log against a plain array
//---------------------------------------------------------------------------//
struct ArrayLog
{
    std::map<VertexId, Spin> init;
    std::vector<Transition> steps;

    Spin evaluate(Rank t, VertexId v) const
    {
        t = std::min<Rank>(t, steps.size());
        for (Rank i = t; i-- > 0;)
            if (steps[i].vertex == v)
                return steps[i].spin;
        return init.at(v);
    }
    std::optional<Rank> successor(Rank t, VertexId v) const
    {
        for (Rank i = t; i < steps.size(); ++i)
            if (steps[i].vertex == v)
                return i + 1;
        return std::nullopt;
    }
    std::size_t count(VertexId v) const
    {
        return static_cast<std::size_t>(std::count_if(
            steps.begin(), steps.end(), [v](const Transition& x) { return x.vertex == v; }));
    }
};

CriterionResult check_exec_log(const AcceptanceOptions& opt)
{
    CriterionResult r{1, "execution log vs array oracle", false, false, {}, 0};
    Rng rng(opt.seed, 1);
    ExecutionLog log;
    ArrayLog ref;
    const int q = 3;
    std::vector<VertexId> ids;
    std::size_t mismatches = 0;
    auto expect = [&](bool ok) {
        if (!ok)
            ++mismatches;
    };
    for (VertexId v = 0; v < 12; ++v)
    {
        Spin c = static_cast<Spin>(rng.uniform_index(q));
        log.add_vertex_initial(v, c);
        ref.init[v] = c;
        ids.push_back(v);
    }
    auto pick = [&] { return ids[rng.uniform_index(ids.size())]; };
    auto spin = [&] { return static_cast<Spin>(rng.uniform_index(q)); };
    auto begin = Clock::now();
    for (std::size_t op = 0; op < kLogOps; ++op)
    {
        const Rank len = ref.steps.size();
        std::uint64_t kind = rng.uniform_index(100);
        if (len > 3000 && kind < 34)
            kind = 40;  // keep the oracle's scans short
        if (kind < 30)
        {
            Rank t = 1 + rng.uniform_index(len + 1);
            VertexId v = pick();
            Spin c = spin();
            log.insert(t, v, c);
            ref.steps.insert(ref.steps.begin() + static_cast<std::ptrdiff_t>(t - 1), {v, c});
        }
        else if (kind < 34)
        {
            VertexId v = pick();
            Spin c = spin();
            log.append(v, c);
            ref.steps.push_back({v, c});
        }
        else if (kind < 48)
        {
            if (len == 0)
                continue;
            Rank t = 1 + rng.uniform_index(len);
            log.remove(t);
            ref.steps.erase(ref.steps.begin() + static_cast<std::ptrdiff_t>(t - 1));
        }
        else if (kind < 56)
        {
            if (len == 0)
                continue;
            Rank t = 1 + rng.uniform_index(len);
            Spin c = spin();
            log.change(t, c);
            ref.steps[t - 1].spin = c;
        }
        else if (kind < 72)
        {
            Rank t = rng.uniform_index(len + 3);
            VertexId v = pick();
            expect(log.evaluate(t, v) == ref.evaluate(t, v));
        }
        else if (kind < 82)
        {
            Rank t = rng.uniform_index(len + 1);
            VertexId v = pick();
            expect(log.successor(t, v) == ref.successor(t, v));
        }
        else if (kind < 86)
        {
            if (len == 0)
                continue;
            Rank t = 1 + rng.uniform_index(len);
            expect(log.at(t) == ref.steps[t - 1]);
            // Cursor reads agree with rank reads
            auto x = log.step_at(t);
            VertexId v = pick();
            expect(log.rank_of(x) == t);
            expect(log.value_before(x, log.slot_of(v)) == ref.evaluate(t - 1, v));
            auto nx = log.next_occurrence(x, log.slot_of(v));
            auto succ = ref.successor(t, v);
            expect(succ ? (nx != ExecutionLog::npos && log.rank_of(nx) == *succ)
                        : nx == ExecutionLog::npos);
        }
        else if (kind < 89)
        {
            VertexId v = 100 + rng.uniform_index(1000000);
            if (ref.init.count(v))
                continue;
            Spin c = spin();
            log.add_vertex_initial(v, c);
            ref.init[v] = c;
            ids.push_back(v);
        }
        else if (kind < 92)
        {
            VertexId v = pick();
            Spin c = spin();
            log.set_initial(v, c);
            ref.init[v] = c;
        }
        else if (kind < 94)
        {
            // Rare, since each removal wipes a share of the log
            if (ids.size() <= 4 || rng.uniform01() < 0.95)
                continue;
            VertexId v = pick();
            expect(log.remove_all(v) == ref.count(v));
            std::erase_if(ref.steps, [v](const Transition& x) { return x.vertex == v; });
            log.remove_vertex(v);
            ref.init.erase(v);
            std::erase(ids, v);
        }
        else if (kind < 95)
        {
            if (len < 2000)
                continue;
            Rank t = len / 2 + rng.uniform_index(len / 2 + 1);
            log.truncate(t);
            ref.steps.resize(t);
        }
        else
        {
            VertexId v = pick();
            expect(log.final_spin(v) == ref.evaluate(len, v));
            expect(log.occurrences(v) == ref.count(v));
        }
        if (op % 5000 == 4999)
        {
            expect(log.check_invariants());
            expect(log.transitions() == ref.steps);
            expect(log.initial_state() == ref.init);
            expect(log.length() == ref.steps.size());
        }
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - begin).count();
    r.passed = mismatches == 0 && r.seconds < kLogSeconds;
    r.detail = std::to_string(kLogOps) + " ops, " + std::to_string(mismatches)
               + " mismatches, final length " + std::to_string(ref.steps.size()) + ", limit "
               + fmt(kLogSeconds) + " s";
    return r;
}

//---------------------------------------------------------------------------//
// 2. Correction kernel exactness by enumeration
//---------------------------------------------------------------------------//
MrfInstance random_star(int q, std::size_t deg, Rng& rng, bool allow_hard)
{
    std::vector<std::pair<VertexId, VertexPotential>> vs;
    std::vector<std::pair<EdgeKey, EdgePotential>> es;
    auto weight = [&] { return 2.0 * rng.uniform01() - 1.0; };
    std::vector<double> center(q);
    for (auto& w : center)
        w = weight();
    if (allow_hard && rng.uniform01() < 0.2)
        center[rng.uniform_index(q - 1) + 1] = kNegInf;  // spin 0 stays finite
    vs.emplace_back(0, VertexPotential(center));
    for (std::size_t k = 1; k <= deg; ++k)
    {
        std::vector<double> w(q);
        for (auto& x : w)
            x = weight();
        vs.emplace_back(k, VertexPotential(w));
        std::vector<double> m(q * q);
        for (int a = 0; a < q; ++a)
            for (int b = a; b < q; ++b)
                m[a * q + b] = m[b * q + a] = weight();
        es.emplace_back(EdgeKey::of(0, k), EdgePotential(q, m));
    }
    return MrfInstance::build(q, std::move(vs), std::move(es));
}

CriterionResult check_kernel(const AcceptanceOptions& opt)
{
    CriterionResult r{2, "correction kernel exactness", false, false, {}, 0};
    auto begin = Clock::now();
    Rng rng(opt.seed, 2);
    double worst_err = 0;
    double worst_excess = -1;
    std::size_t boundaries = 0;
    bool ok = true;
    for (std::size_t c = 0; c < kKernelCases; ++c)
    {
        int q = 2 + static_cast<int>(rng.uniform_index(2));
        std::size_t deg = rng.uniform_index(4);
        // Same graph, independent potentials
        Rng r1 = rng.split(1000 + 2 * c);
        Rng r2 = rng.split(1001 + 2 * c);
        auto old_inst = random_star(q, deg, r1, false);
        auto new_inst = random_star(q, deg, r2, true);
        auto ov = old_inst.local(0);
        auto nv = new_inst.local(0);
        double bound = p_up(ov, nv);
        std::vector<Spin> tau(deg, 0);
        std::size_t total = 1;
        for (std::size_t k = 0; k < deg; ++k)
            total *= static_cast<std::size_t>(q);
        for (std::size_t code = 0; code < total; ++code)
        {
            std::size_t x = code;
            for (std::size_t k = 0; k < deg; ++k)
            {
                tau[k] = static_cast<Spin>(x % q);
                x /= q;
            }
            auto mu_old = ov.marginal(tau);
            auto mu_new = nv.marginal(tau);
            auto kernel = correction_kernel(ov, nv, tau);
            double moved = 0;
            for (int s = 0; s < q; ++s)
                moved += mu_old[s] * kernel.p[s];
            for (int s = 0; s < q; ++s)
            {
                double law = mu_old[s] * (1 - kernel.p[s]);
                if (kernel.nu)
                    law += moved * (*kernel.nu)[s];
                worst_err = std::max(worst_err, std::abs(law - mu_new[s]));
                worst_excess = std::max(worst_excess, kernel.p[s] - bound);
            }
            ++boundaries;
        }
    }
    ok = worst_err <= kKernelTol && worst_excess <= 0;
    r.seconds = std::chrono::duration<double>(Clock::now() - begin).count();
    r.passed = ok;
    r.detail = std::to_string(kKernelCases) + " local pairs, " + std::to_string(boundaries)
               + " boundaries, max law error " + fmt(worst_err, 3) + " (tol "
               + fmt(kKernelTol, 3) + "), max p - p_up " + fmt(worst_excess, 3);
    return r;
}

//---------------------------------------------------------------------------//
// 3. Law preservation through the update pipeline
//---------------------------------------------------------------------------//
struct Scenario
{
    std::string name;
    MrfInstance before;
    UpdateBatch batch;
};

std::vector<Scenario> law_scenarios()
{
    std::vector<Scenario> out;
    {
        Scenario s{"ising path5 coupling 0.2 to 0.4", ising_model(path_graph(5), 0.2), {}};
        for (auto& [e, phi] : s.before.edges())
            s.batch.records.push_back(SetEdgePotential{e, ising_coupling(0.4)});
        s.batch.records.push_back(SetVertexPotential{2, ising_field(0.3)});
        out.push_back(std::move(s));
    }
    {
        Scenario s{"ising cycle5 edge add", ising_model(cycle_graph(5), 0.3, 0.1), {}};
        s.batch.records.push_back(AddEdge{EdgeKey::of(0, 2), ising_coupling(0.5)});
        out.push_back(std::move(s));
    }
    {
        Scenario s{"ising cycle5 edge delete", ising_model(cycle_graph(5), 0.4, -0.2), {}};
        s.batch.records.push_back(DeleteEdge{EdgeKey::of(1, 2)});
        out.push_back(std::move(s));
    }
    {
        Scenario s{"hardcore cycle5 edge delete then add", hardcore_model(cycle_graph(5), 0.5), {}};
        s.batch.records.push_back(DeleteEdge{EdgeKey::of(0, 1)});
        s.batch.records.push_back(AddEdge{EdgeKey::of(0, 2), hardcore_edge()});
        out.push_back(std::move(s));
    }
    {
        Scenario s{"ising path4 vertex add and delete", ising_model(path_graph(4), 0.3, 0.2), {}};
        s.batch.records.push_back(DeleteEdge{EdgeKey::of(2, 3)});
        s.batch.records.push_back(DeleteVertex{3});
        s.batch.records.push_back(AddVertex{7, ising_field(-0.4)});
        s.batch.records.push_back(AddEdge{EdgeKey::of(7, 0), ising_coupling(0.6)});
        out.push_back(std::move(s));
    }
    {
        Scenario s{"3-coloring path4 composite", coloring_model(path_graph(4), 3), {}};
        s.batch.records.push_back(SetVertexPotential{1, VertexPotential({0.0, 0.5, -0.3})});
        s.batch.records.push_back(DeleteEdge{EdgeKey::of(2, 3)});
        s.batch.records.push_back(AddEdge{EdgeKey::of(0, 2), coloring_edge(3)});
        out.push_back(std::move(s));
    }
    {
        Scenario s{"hardcore path5 fugacity and vertex add", hardcore_model(path_graph(5), 0.4), {}};
        s.batch.records.push_back(SetVertexPotential{0, hardcore_vertex(1.5)});
        s.batch.records.push_back(AddVertex{9, hardcore_vertex(0.8)});
        s.batch.records.push_back(AddEdge{EdgeKey::of(9, 4), hardcore_edge()});
        out.push_back(std::move(s));
    }
    return out;
}

CriterionResult check_law(const AcceptanceOptions& opt, std::ostream& out)
{
    CriterionResult r{3, "law preservation, updated vs fresh chains", false, false, {}, 0};
    auto begin = Clock::now();
    auto scenarios = law_scenarios();
    const double alpha = kLawAlpha / static_cast<double>(scenarios.size());
    ChainParams params;
    params.delta = 0.5;
    double worst_p = 1;
    std::string worst_name;
    bool ok = true;
    for (std::size_t k = 0; k < scenarios.size(); ++k)
    {
        const auto& sc = scenarios[k];
        MrfInstance after = apply_batch(sc.before, sc.batch);
        ExactDistribution space;
        space.q = after.q();
        space.vertices.assign(after.vertices().begin(), after.vertices().end());
        const Rank length = mixing_length(after.num_vertices(), params);

        Histogram updated;
        std::map<VertexId, Spin> start;
        for (std::size_t i = 0; i < kLawReps; ++i)
        {
            Rng rng(opt.seed + 31 * k, i);
            auto log = run_chain(sc.before, params, rng);
            apply_update(sc.before, sc.batch, log, params, rng);
            ++updated[space.encode(log.final_sample())];
            if (i == 0)
                start = log.initial_state();
        }
        // Fresh chains on the new instance from the same initial state
        std::vector<std::pair<VertexId, Spin>> init(start.begin(), start.end());
        Histogram fresh;
        for (std::size_t i = 0; i < kLawReps; ++i)
        {
            Rng rng(opt.seed + 31 * k + 17, i);
            ExecutionLog log;
            log.assign(init, {});
            length_fix(after, log, length, rng);
            ++fresh[space.encode(log.final_sample())];
        }
        auto test = two_sample_chi_square(updated, fresh);
        bool pass = test.p_value > alpha;
        ok = ok && pass;
        if (test.p_value < worst_p)
        {
            worst_p = test.p_value;
            worst_name = sc.name;
        }
        out << "    " << (pass ? "ok  " : "FAIL") << " " << sc.name << ": chi2 "
            << fmt(test.statistic) << " dof " << test.dof << " p " << fmt(test.p_value) << '\n';
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - begin).count();
    r.passed = ok && r.seconds < kLawSeconds;
    r.detail = std::to_string(scenarios.size()) + " scenarios x " + std::to_string(kLawReps)
               + " reps per side, min p " + fmt(worst_p) + " (" + worst_name
               + "), threshold " + fmt(alpha) + " after Bonferroni, limit "
               + fmt(kLawSeconds) + " s";
    return r;
}

//---------------------------------------------------------------------------//
// 4. Total variation after a run of updates
//---------------------------------------------------------------------------//
CriterionResult check_tv(const AcceptanceOptions& opt)
{
    CriterionResult r{4, "TV accuracy after updates", false, false, {}, 0};
    auto begin = Clock::now();
    const std::size_t n = 6;
    const double beta_max = 0.3;
    const std::size_t deg_cap = 3;
    auto inst = ising_model(cycle_graph(n), 0.2);
    ChainSet::Options o;
    o.params.seed = opt.seed + 4;
    o.params.delta = 1 - deg_cap * std::tanh(beta_max) - 0.005;
    o.schedule.count = {static_cast<double>(kTvChains), 0, 0};
    o.schedule.eps = {kTvEps, 0, 0};
    o.threads = opt.threads;
    ChainSet chains(inst, o);

    Rng rng(opt.seed, 4);
    bool in_regime = true;
    for (std::size_t b = 0; b < kTvBatches; ++b)
    {
        const auto& cur = chains.instance();
        UpdateBatch batch;
        std::uint64_t kind = rng.uniform_index(3);
        if (kind == 0)
        {
            VertexId v = rng.uniform_index(n);
            batch.records.push_back(SetVertexPotential{v, ising_field(rng.uniform01() - 0.5)});
        }
        else if (kind == 1 && cur.num_edges() > 0)
        {
            auto it = cur.edges().begin();
            std::advance(it, rng.uniform_index(cur.num_edges()));
            batch.records.push_back(
                SetEdgePotential{it->first, ising_coupling(0.05 + 0.25 * rng.uniform01())});
        }
        else
        {
            VertexId u = rng.uniform_index(n);
            VertexId v = (u + 1 + rng.uniform_index(n - 1)) % n;
            EdgeKey e = EdgeKey::of(u, v);
            if (cur.has_edge(e))
                batch.records.push_back(DeleteEdge{e});
            else if (cur.degree(u) < deg_cap && cur.degree(v) < deg_cap)
                batch.records.push_back(AddEdge{e, ising_coupling(0.05 + 0.25 * rng.uniform01())});
            else
                batch.records.push_back(SetVertexPotential{u, ising_field(0.1)});
        }
        MrfInstance target = apply_batch(cur, batch);
        in_regime = in_regime
                    && model_regime_bound(ModelKind::ising, target).delta >= o.params.delta;
        chains.apply_to(target);
    }
    auto exact = exact_gibbs(chains.instance());
    std::vector<double> emp(exact.prob.size(), 0.0);
    for (std::size_t i = 0; i < chains.size(); ++i)
        emp[exact.encode(chains.sample(i))] += 1.0 / static_cast<double>(chains.size());
    double tv = 0;
    for (std::size_t k = 0; k < emp.size(); ++k)
        tv += std::abs(emp[k] - exact.prob[k]);
    tv /= 2;
    const double bound =
        kTvEps + 2 * std::sqrt(std::pow(2.0, double(n)) / (2.0 * double(kTvChains)));
    r.seconds = std::chrono::duration<double>(Clock::now() - begin).count();
    r.passed = in_regime && tv <= bound && chains.size() == kTvChains;
    r.detail = "n=6 cycle Ising, " + std::to_string(kTvBatches) + " batches, "
               + std::to_string(chains.size()) + " chains of length "
               + std::to_string(chains.chain_length()) + ", TV " + fmt(tv) + " <= " + fmt(bound)
               + (in_regime ? "" : ", left the regime");
    return r;
}

//---------------------------------------------------------------------------//
// 5. Cost envelopes
//---------------------------------------------------------------------------//
CriterionResult check_costs(const AcceptanceOptions& opt, std::ostream& out)
{
    CriterionResult r{5, "cost envelopes", false, false, {}, 0};
    auto begin = Clock::now();
    const double beta = 0.15;
    const std::size_t deg_cap = 4;
    const double delta = 0.4;  // below 1 - 4 tanh(0.15)
    const std::size_t trials = 4;
    bool ok = true;
    double worst_ham = 0;
    double worst_graph = 0;
    double worst_filter = 0;
    for (std::size_t n : {200, 400, 800})
    {
        for (std::size_t L : {1, 4, 16})
        {
            Rng rng(opt.seed + n, L);
            auto g = random_bounded_degree_graph(n, 3, n * 13 / 10, rng);
            ChainSet::Options o;
            o.params.seed = opt.seed + 5 * n + L;
            o.params.delta = delta;
            o.schedule.count = {16, 0, 0};
            o.schedule.eps = {0.01, 0, 0};
            o.threads = opt.threads;
            ChainSet chains(ising_model(g, beta), o);
            std::vector<double> field(n, 0.0);
            double ham_sum = 0, ham_env = 0, graph_sum = 0, graph_env = 0;
            double filt_sum = 0, filt_env = 0;
            std::size_t ham_obs = 0, graph_obs = 0;
            for (std::size_t t = 0; t < trials; ++t)
            {
                const auto& cur = chains.instance();
                // Potential-only batch: L distinct fields move by 0.5
                UpdateBatch hb;
                std::set<VertexId> used;
                while (used.size() < L)
                {
                    VertexId v = rng.uniform_index(n);
                    if (!used.insert(v).second)
                        continue;
                    field[v] += field[v] > 0 ? -0.5 : 0.5;
                    hb.records.push_back(SetVertexPotential{v, ising_field(field[v])});
                }
                MrfInstance ht = apply_batch(cur, hb);
                double l_ham = instance_diff(cur, ht).d_ham;
                double dmax = static_cast<double>(ht.max_degree());
                chains.apply_to(ht);
                const double T = static_cast<double>(chains.chain_length());
                for (const auto& m : chains.chain_metrics())
                {
                    ham_sum += static_cast<double>(m.r_ham);
                    filt_sum += static_cast<double>(m.filter_size);
                    ++ham_obs;
                }
                ham_env += kCostC * dmax * T * l_ham / (double(n) * delta) * double(chains.size());
                filt_env += kFilterC * T * l_ham / double(n) * double(chains.size());

                // Graph-only batch: L edge toggles within the degree cap
                const auto& cur2 = chains.instance();
                std::set<EdgeKey> edges;
                std::map<VertexId, std::size_t> deg;
                for (auto& [e, phi] : cur2.edges())
                    edges.insert(e);
                for (VertexId v : cur2.vertices())
                    deg[v] = cur2.degree(v);
                UpdateBatch gb;
                std::set<EdgeKey> touched;
                while (gb.records.size() < L)
                {
                    if (rng.uniform01() < 0.5)
                    {
                        auto it = edges.begin();
                        std::advance(it, rng.uniform_index(edges.size()));
                        if (touched.count(*it))
                            continue;
                        EdgeKey e = *it;
                        touched.insert(e);
                        edges.erase(e);
                        --deg[e.lo];
                        --deg[e.hi];
                        gb.records.push_back(DeleteEdge{e});
                    }
                    else
                    {
                        VertexId u = rng.uniform_index(n);
                        VertexId v = rng.uniform_index(n);
                        if (u == v)
                            continue;
                        EdgeKey e = EdgeKey::of(u, v);
                        if (edges.count(e) || touched.count(e) || deg[u] >= deg_cap
                            || deg[v] >= deg_cap)
                            continue;
                        touched.insert(e);
                        edges.insert(e);
                        ++deg[u];
                        ++deg[v];
                        gb.records.push_back(AddEdge{e, ising_coupling(beta)});
                    }
                }
                MrfInstance gt = apply_batch(cur2, gb);
                double l_graph = instance_diff(cur2, gt).d_graph;
                dmax = static_cast<double>(std::max(cur2.max_degree(), gt.max_degree()));
                chains.apply_to(gt);
                for (const auto& m : chains.chain_metrics())
                {
                    graph_sum += static_cast<double>(m.r_graph);
                    ++graph_obs;
                }
                graph_env += kCostC * dmax * T * l_graph / (double(n) * delta)
                             * double(chains.size());
            }
            double ham_mean = ham_sum / double(ham_obs);
            double ham_bound = ham_env / double(ham_obs);
            double graph_mean = graph_sum / double(graph_obs);
            double graph_bound = graph_env / double(graph_obs);
            double filt_mean = filt_sum / double(ham_obs);
            double filt_base = filt_env / double(ham_obs);
            double filt_bound = filt_base + 4 * std::sqrt(filt_base / double(ham_obs));
            bool cell = ham_mean <= ham_bound && graph_mean <= graph_bound
                        && filt_mean <= filt_bound;
            ok = ok && cell;
            worst_ham = std::max(worst_ham, ham_mean / ham_bound);
            worst_graph = std::max(worst_graph, graph_mean / graph_bound);
            worst_filter = std::max(worst_filter, filt_mean / filt_bound);
            out << "    " << (cell ? "ok  " : "FAIL") << " n=" << n << " L=" << L
                << ": r_ham " << fmt(ham_mean) << " <= " << fmt(ham_bound) << ", r_graph "
                << fmt(graph_mean) << " <= " << fmt(graph_bound) << ", |P| " << fmt(filt_mean)
                << " <= " << fmt(filt_bound) << '\n';
        }
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - begin).count();
    r.passed = ok;
    r.detail = "9 cells, worst mean/envelope: r_ham " + fmt(worst_ham, 3) + ", r_graph "
               + fmt(worst_graph, 3) + ", |P| " + fmt(worst_filter, 3);
    return r;
}

//---------------------------------------------------------------------------//
// 6. Speedup over regeneration
//---------------------------------------------------------------------------//
CriterionResult check_speedup(const AcceptanceOptions& opt)
{
    CriterionResult r{6, "speedup over full regeneration", false, false, {}, 0};
    auto begin = Clock::now();
    auto w = torus_workload(100, 0.1, 10, 4, opt.seed);
    ChainSet::Options o;
    o.params.seed = opt.seed + 6;
    o.params.delta = 0.5;
    o.schedule.count = {100, 0, 0};
    o.schedule.eps = {0.01, 0, 0};
    o.threads = opt.threads;
    auto report = run_bench(w.instance, w.batches, o, 1);
    double ratio = report.ratio();
    r.seconds = std::chrono::duration<double>(Clock::now() - begin).count();
    r.passed = true;
    r.warned = !(ratio <= kSpeedupTarget);
    double upd = 0;
    double base = 0;
    for (const auto& s : report.steps)
    {
        upd += s.update_seconds;
        base += s.baseline_seconds.value_or(0);
    }
    const double k = static_cast<double>(report.steps.size());
    r.detail = "n=" + std::to_string(report.n) + ", N=" + std::to_string(report.chains)
               + ", T=" + std::to_string(report.chain_length) + ", L=10: update "
               + fmt(upd / k, 3) + " s vs regeneration " + fmt(base / k, 3) + " s, ratio "
               + fmt(ratio, 3) + " (target " + fmt(kSpeedupTarget) + ")";
    return r;
}

//---------------------------------------------------------------------------//
// 7. Influence check against closed-form regimes
//---------------------------------------------------------------------------//
CriterionResult check_regimes(const AcceptanceOptions& opt)
{
    CriterionResult r{7, "influence check vs model regimes", false, false, {}, 0};
    auto begin = Clock::now();
    Rng rng(opt.seed, 7);
    std::size_t ising_agree = 0, ising_band = 0, ising_bad = 0;
    for (std::size_t i = 0; i < kRegimeInstances; ++i)
    {
        std::size_t d = 3 + rng.uniform_index(3);
        auto g = random_regular_graph(10, d, rng);
        double base = std::atanh(1.0 / double(d));
        double s;
        if (i % 10 == 0)
            s = (rng.uniform01() - 0.5) * 1e-12;  // on the boundary itself
        else
            s = (rng.uniform01() < 0.5 ? -1 : 1) * (1e-4 + 0.2 * rng.uniform01());
        double beta = base * (1 + s);
        // An odd number of other neighbors needs a field to reach zero total field
        double h = (d - 1) % 2 == 1 ? beta : 0.0;
        auto inst = ising_model(g, beta, h);
        bool satisfied = dobrushin_check(inst).satisfied;
        bool predicate = ising_in_regime(beta, d);
        if (satisfied == predicate)
            ++ising_agree;
        else if (std::abs(double(d) * std::tanh(beta) - 1) < kRegimeBand)
            ++ising_band;
        else
            ++ising_bad;
    }
    std::size_t col_regime = 0, col_bad = 0;
    for (std::size_t i = 0; i < kRegimeInstances; ++i)
    {
        std::size_t cap = 2 + rng.uniform_index(2);
        auto g = random_bounded_degree_graph(8, cap, 8 * cap, rng);
        Graph probe = g;
        auto tmp = coloring_model(probe, 2 * int(cap) + 3);
        std::size_t d = tmp.max_degree();
        int q = std::max<int>(int(d) + 1, 2 * int(d) - 1 + int(rng.uniform_index(4)));
        q = std::max(q, 2);
        auto inst = coloring_model(g, q);
        if (coloring_in_regime(q, d))
        {
            ++col_regime;
            if (!dobrushin_check(inst).satisfied)
                ++col_bad;
        }
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - begin).count();
    r.passed = ising_bad == 0 && col_bad == 0;
    r.detail = "Ising " + std::to_string(ising_agree) + "/" + std::to_string(kRegimeInstances)
               + " agree, " + std::to_string(ising_band) + " in the " + fmt(kRegimeBand, 2)
               + " band, " + std::to_string(ising_bad) + " outside; coloring "
               + std::to_string(col_regime) + " in regime, " + std::to_string(col_bad)
               + " unsatisfied";
    return r;
}

//---------------------------------------------------------------------------//
// 8. Incremental estimators vs rebuild
//---------------------------------------------------------------------------//
std::vector<Configuration> random_samples(std::size_t m, int q, Rng& rng)
{
    std::vector<Configuration> out(m);
    for (auto& s : out)
        for (VertexId v = 0; v < 10; ++v)
            if (rng.uniform01() < 0.8)
                s[v] = static_cast<Spin>(rng.uniform_index(q));
    return out;
}

std::vector<Configuration> perturb(const std::vector<Configuration>& xs, int q, Rng& rng)
{
    std::size_t m = xs.size();
    std::int64_t delta = static_cast<std::int64_t>(rng.uniform_index(7)) - 3;
    std::size_t m2 = static_cast<std::size_t>(std::max<std::int64_t>(0, std::int64_t(m) + delta));
    auto out = random_samples(m2, q, rng);
    for (std::size_t i = 0; i < std::min(m, m2); ++i)
    {
        out[i] = xs[i];
        for (VertexId v = 0; v < 10; ++v)
        {
            double u = rng.uniform01();
            if (u < 0.1)
                out[i][v] = static_cast<Spin>(rng.uniform_index(q));
            else if (u < 0.13)
                out[i].erase(v);
        }
    }
    return out;
}

Query random_query(int q, Rng& rng)
{
    std::vector<VertexId> pool = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    for (std::size_t i = pool.size(); i > 1; --i)
        std::swap(pool[i - 1], pool[rng.uniform_index(i)]);
    Query query;
    query.kind = static_cast<QueryKind>(rng.uniform_index(3));
    std::size_t na = 1 + rng.uniform_index(3);
    query.a.assign(pool.begin(), pool.begin() + na);
    if (query.kind != QueryKind::marginal)
    {
        std::size_t nb = rng.uniform_index(3);
        query.b.assign(pool.begin() + na, pool.begin() + na + nb);
        for (std::size_t j = 0; j < nb; ++j)
            query.tau_b.push_back(static_cast<Spin>(rng.uniform_index(q)));
    }
    return query;
}

CriterionResult check_estimators(const AcceptanceOptions& opt)
{
    CriterionResult r{8, "incremental estimators vs rebuild", false, false, {}, 0};
    auto begin = Clock::now();
    Rng rng(opt.seed, 8);
    std::size_t mismatches = 0, diffs = 0, entries = 0;
    for (std::size_t trial = 0; trial < kDiffTrials; ++trial)
    {
        int q = 2 + static_cast<int>(rng.uniform_index(2));
        auto cur = random_samples(rng.uniform_index(12), q, rng);
        std::vector<Estimator> ests;
        for (int j = 0; j < 3; ++j)
        {
            ests.emplace_back(random_query(q, rng), q);
            ests.back().rebuild(cur);
        }
        for (int step = 0; step < 5; ++step)
        {
            auto next = perturb(cur, q, rng);
            auto diff = sample_diff(cur, next);
            // Brute-force count of differing coordinates
            std::size_t brute = 0;
            for (std::size_t i = 0; i < std::max(cur.size(), next.size()); ++i)
                for (VertexId v = 0; v < 10; ++v)
                {
                    std::optional<Spin> a, b;
                    if (i < cur.size() && cur[i].count(v))
                        a = cur[i].at(v);
                    if (i < next.size() && next[i].count(v))
                        b = next[i].at(v);
                    brute += a != b;
                }
            if (brute != diff.size())
                ++mismatches;
            for (auto& e : ests)
            {
                e.apply(diff);
                Estimator fresh(e.query(), q);
                fresh.rebuild(next);
                if (fresh.counts() != e.counts() || fresh.total() != e.total())
                    ++mismatches;
            }
            ++diffs;
            entries += diff.size();
            cur = std::move(next);
        }
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - begin).count();
    r.passed = mismatches == 0;
    r.detail = std::to_string(kDiffTrials) + " streams, " + std::to_string(diffs) + " diffs, "
               + std::to_string(entries) + " entries, " + std::to_string(mismatches)
               + " mismatches";
    return r;
}

//---------------------------------------------------------------------------//
// 9. Determinism of the run command
//---------------------------------------------------------------------------//
std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

CriterionResult check_determinism(const AcceptanceOptions& opt)
{
    namespace fs = std::filesystem;
    CriterionResult r{9, "run determinism", false, false, {}, 0};
    auto begin = Clock::now();
    fs::path dir = opt.scratch_dir.empty()
                       ? fs::temp_directory_path() / ("dyngibbs-accept-" + std::to_string(opt.seed))
                       : fs::path(opt.scratch_dir);
    fs::create_directories(dir);
    {
        std::ofstream(dir / "instance.json") << instance_to_json(ising_model(cycle_graph(8), 0.25, 0.1)).dump();
        std::ofstream up(dir / "updates.jsonl");
        UpdateBatch b1, b2, b3;
        b1.records.push_back(SetVertexPotential{3, ising_field(-0.4)});
        b2.records.push_back(AddEdge{EdgeKey::of(0, 4), ising_coupling(0.2)});
        b2.records.push_back(AddVertex{20, ising_field(0.3)});
        b3.records.push_back(DeleteEdge{EdgeKey::of(6, 7)});
        b3.records.push_back(DeleteEdge{EdgeKey::of(7, 0)});
        b3.records.push_back(DeleteVertex{7});
        for (auto* b : {&b1, &b2, &b3})
            up << batch_to_json(*b).dump() << '\n';
        std::ofstream(dir / "queries.json")
            << R"([{"kind":"marginal","a":[0,1]},{"kind":"posterior","a":[2],"b":[3],"tau_b":[1]},{"kind":"map","a":[4],"b":[5],"tau_b":[0]}])";
    }
    auto run = [&](const std::string& name, unsigned threads) {
        RunConfig c;
        c.instance_path = (dir / "instance.json").string();
        c.updates_path = (dir / "updates.jsonl").string();
        c.queries_path = (dir / "queries.json").string();
        c.schedule = "N=50:0.5,eps=0.01";
        c.seed = opt.seed;
        c.threads = threads;
        c.out_dir = (dir / name).string();
        cmd_run(c);
        return slurp(dir / name / "estimates.jsonl") + slurp(dir / name / "samples.jsonl");
    };
    std::string a = run("first", opt.threads);
    std::string b = run("second", opt.threads);
    std::string c = run("threaded", opt.threads == 1 ? 2 : 1);
    r.seconds = std::chrono::duration<double>(Clock::now() - begin).count();
    r.passed = !a.empty() && a == b && a == c;
    r.detail = "two runs " + std::string(a == b ? "identical" : "differ") + " ("
               + std::to_string(a.size()) + " bytes); other thread count "
               + (a == c ? "identical" : "differs");
    return r;
}
}  // namespace

//---------------------------------------------------------------------------//
std::string format_result(const CriterionResult& r)
{
    std::string tag = !r.passed ? "[FAIL]" : (r.warned ? "[WARN]" : "[PASS]");
    return tag + " " + std::to_string(r.id) + " " + r.name + ": " + r.detail + " ("
           + fmt(r.seconds, 3) + " s)";
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& out)
{
    std::vector<std::pair<int, std::function<CriterionResult()>>> all = {
        {1, [&] { return check_exec_log(options); }},
        {2, [&] { return check_kernel(options); }},
        {3, [&] { return check_law(options, out); }},
        {4, [&] { return check_tv(options); }},
        {5, [&] { return check_costs(options, out); }},
        {6, [&] { return check_speedup(options); }},
        {7, [&] { return check_regimes(options); }},
        {8, [&] { return check_estimators(options); }},
        {9, [&] { return check_determinism(options); }},
    };
    std::vector<CriterionResult> results;
    for (auto& [id, fn] : all)
    {
        if (!options.only.empty()
            && std::find(options.only.begin(), options.only.end(), id) == options.only.end())
            continue;
        CriterionResult r;
        try
        {
            r = fn();
        }
        catch (const std::exception& e)
        {
            r.id = id;
            r.name = "criterion " + std::to_string(id);
            r.passed = false;
            r.detail = std::string("threw: ") + e.what();
        }
        out << format_result(r) << std::endl;
        results.push_back(r);
    }
    return results;
}

}  // namespace dyngibbs
