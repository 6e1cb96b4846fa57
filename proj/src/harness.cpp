#include "dyngibbs/harness.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>

namespace dyngibbs
{
namespace
{
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::ofstream open_out(const std::string& dir, const std::string& name)
{
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
    if (!out)
        fail(Errc::invalid_argument, "cannot write " + name + " under " + dir);
    return out;
}

const char* kind_name(QueryKind k)
{
    switch (k)
    {
        case QueryKind::marginal: return "marginal";
        case QueryKind::posterior: return "posterior";
        case QueryKind::map: return "map";
    }
    return "?";
}

bool query_present(const MrfInstance& inst, const Query& q)
{
    for (VertexId v : q.a)
        if (!inst.has_vertex(v))
            return false;
    for (VertexId v : q.b)
        if (!inst.has_vertex(v))
            return false;
    return true;
}

void emit_estimates(std::ostream& out, std::size_t step, const MrfInstance& inst,
                    const std::vector<Estimator>& ests)
{
    for (std::size_t j = 0; j < ests.size(); ++j)
    {
        Json line = {{"step", step}, {"query", j}, {"kind", kind_name(ests[j].query().kind)}};
        if (!query_present(inst, ests[j].query()))
        {
            line["error"] = to_string(Errc::unknown_vertex);
        }
        else
        {
            try
            {
                line["values"] = ests[j].estimate();
            }
            catch (const Error& e)
            {
                if (e.code() != Errc::empty_posterior_condition)
                    throw;
                line["error"] = to_string(e.code());
            }
        }
        out << line.dump() << '\n';
    }
}
}  // namespace

//---------------------------------------------------------------------------//
DeltaSource parse_delta(const std::string& text)
{
    DeltaSource d;
    if (text == "check")
    {
        d.kind = DeltaSource::Kind::check;
        return d;
    }
    auto colon = text.find(':');
    std::string head = text.substr(0, colon);
    std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "given")
    {
        d.kind = DeltaSource::Kind::given;
        std::size_t used = 0;
        try
        {
            d.value = std::stod(tail, &used);
        }
        catch (const std::exception&)
        {
            used = 0;
        }
        if (used == 0 || used != tail.size() || !(d.value > 0 && d.value < 1))
            fail(Errc::invalid_argument, "delta given:X needs X in (0, 1)");
        return d;
    }
    if (head == "model")
    {
        d.kind = DeltaSource::Kind::model;
        d.model = parse_model_kind(tail);
        return d;
    }
    fail(Errc::invalid_argument, "delta must be given:X, check, or model:NAME");
}

ChainParams resolve_params(const MrfInstance& inst, const DeltaSource& src, std::uint64_t seed)
{
    ChainParams p;
    p.seed = seed;
    switch (src.kind)
    {
        case DeltaSource::Kind::given:
            p.delta = src.value;
            break;
        case DeltaSource::Kind::check:
        {
            auto report = dobrushin_check(inst);
            if (!report.satisfied)
                fail(Errc::regime_violation, "influence row sums reach 1");
            p.delta = std::min(report.delta, 0.999);
            break;
        }
        case DeltaSource::Kind::model:
            p.apply(model_regime_bound(src.model, inst));
            break;
    }
    return p;
}

void check_regime(const MrfInstance& inst, const DeltaSource& src, const ChainParams& params)
{
    if (src.kind == DeltaSource::Kind::given)
        return;
    ChainParams now = resolve_params(inst, src, params.seed);
    if (now.delta < params.delta - 1e-12 || now.scale != params.scale
        || now.log_factor != params.log_factor)
        fail(Errc::regime_violation, "updated instance has a smaller gap than the initial one");
}

ScheduleFns checked_schedule(const std::string& text, std::size_t n)
{
    ScheduleFns fns = parse_schedule(text);
    auto report = schedule_check(fns, 1, std::max<std::size_t>(4 * n, 64));
    if (!report.ok)
        fail(Errc::invalid_argument,
             "schedule fails the bounded-difference check at n = "
                 + std::to_string(*report.first_failure));
    return fns;
}

int exit_code(Errc code)
{
    switch (code)
    {
        case Errc::invalid_argument:
        case Errc::too_large:
            return 1;
        case Errc::infeasible_neighborhood:
        case Errc::infeasible_instance:
        case Errc::regime_violation:
        case Errc::degree_too_large:
            return 3;
        default:
            return 2;
    }
}

//---------------------------------------------------------------------------//
void run_stream(const MrfInstance& inst, const std::vector<UpdateBatch>& batches,
                const std::vector<Query>& queries, const ChainSet::Options& options,
                const DeltaSource& delta, std::ostream& estimates, std::ostream& samples)
{
    if (auto bad = validate_feasibility(inst))
        fail(Errc::infeasible_instance,
             "vertex " + std::to_string(bad->vertex) + " has an infeasible boundary");
    ChainSet chains(inst, options);
    std::vector<Estimator> ests;
    for (const auto& q : queries)
        ests.emplace_back(q, inst.q());
    {
        auto s = chains.samples();
        for (auto& e : ests)
            e.rebuild(s);
    }
    emit_estimates(estimates, 0, chains.instance(), ests);
    for (std::size_t k = 0; k < batches.size(); ++k)
    {
        MrfInstance target = apply_batch(chains.instance(), batches[k]);
        if (auto bad = validate_feasibility(target))
            fail(Errc::infeasible_instance, "update " + std::to_string(k + 1)
                                                + " makes vertex " + std::to_string(bad->vertex)
                                                + " infeasible");
        check_regime(target, delta, options.params);
        auto diff = chains.apply_to(target);
        for (auto& e : ests)
            e.apply(diff);
        emit_estimates(estimates, k + 1, chains.instance(), ests);
    }
    for (std::size_t i = 0; i < chains.size(); ++i)
    {
        Json pairs = Json::array();
        for (auto& [v, s] : chains.sample(i))
            pairs.push_back({v, s});
        samples << Json{{"chain", i}, {"sample", pairs}}.dump() << '\n';
    }
}

void cmd_run(const RunConfig& config)
{
    MrfInstance inst = parse_instance_file(config.instance_path);
    std::vector<UpdateBatch> batches;
    if (!config.updates_path.empty())
        batches = parse_update_stream_file(config.updates_path, inst.q());
    std::vector<Query> queries;
    if (!config.queries_path.empty())
        queries = parse_queries_file(config.queries_path);
    ChainSet::Options opts;
    opts.schedule = checked_schedule(config.schedule, inst.num_vertices());
    opts.params = resolve_params(inst, config.delta, config.seed);
    opts.threads = config.threads;
    opts.edge_order = config.edge_order;
    auto est = open_out(config.out_dir, "estimates.jsonl");
    auto smp = open_out(config.out_dir, "samples.jsonl");
    run_stream(inst, batches, queries, opts, config.delta, est, smp);
}

//---------------------------------------------------------------------------//
double BenchReport::ratio() const
{
    double upd = 0;
    double base = 0;
    for (const auto& s : steps)
    {
        if (s.baseline_seconds)
        {
            upd += s.update_seconds;
            base += *s.baseline_seconds;
        }
    }
    return base > 0 ? upd / base : 0.0;
}

Json BenchReport::to_json() const
{
    Json rows = Json::array();
    for (const auto& s : steps)
    {
        Json r = {{"step", s.step},
                  {"update_seconds", s.update_seconds},
                  {"r_ham", s.metrics.r_ham},
                  {"r_graph", s.metrics.r_graph},
                  {"filter_size", s.metrics.filter_size},
                  {"spins_changed", s.metrics.spins_changed},
                  {"sample_diff", s.sample_diff},
                  {"chains", s.chains},
                  {"chain_length", s.chain_length},
                  {"regenerated", s.metrics.regenerated}};
        r["baseline_seconds"] = s.baseline_seconds ? Json(*s.baseline_seconds) : Json(nullptr);
        rows.push_back(r);
    }
    return {{"n", n},
            {"chains", chains},
            {"chain_length", chain_length},
            {"init_seconds", init_seconds},
            {"speedup_ratio", this->ratio()},
            {"steps", rows}};
}

BenchReport run_bench(const MrfInstance& inst, const std::vector<UpdateBatch>& batches,
                      const ChainSet::Options& options, std::size_t baseline_every)
{
    BenchReport report;
    report.n = inst.num_vertices();
    auto start = Clock::now();
    ChainSet chains(inst, options);
    report.init_seconds = seconds_since(start);
    report.chains = chains.size();
    report.chain_length = chains.chain_length();
    const std::uint64_t base_seed = options.params.seed ^ 0x9e3779b97f4a7c15ULL;
    for (std::size_t k = 0; k < batches.size(); ++k)
    {
        BenchStep step;
        step.step = k + 1;
        MrfInstance target = apply_batch(chains.instance(), batches[k]);
        start = Clock::now();
        auto diff = chains.apply_to(target);
        step.update_seconds = seconds_since(start);
        step.metrics = chains.last_metrics();
        step.sample_diff = diff.size();
        step.chains = chains.size();
        step.chain_length = chains.chain_length();
        if (baseline_every > 0 && (k % baseline_every) == 0)
        {
            const Rank length = chains.chain_length();
            start = Clock::now();
            parallel_for(chains.size(), options.threads, [&](std::size_t i) {
                Rng rng(base_seed + k, i);
                simulate_final(target, length, rng);
            });
            step.baseline_seconds = seconds_since(start);
        }
        report.steps.push_back(step);
    }
    return report;
}

BenchWorkload torus_workload(std::size_t side, double beta, std::size_t per_batch,
                             std::size_t num_batches, std::uint64_t seed)
{
    BenchWorkload w;
    w.instance = ising_model(torus_graph(side, side), beta);
    const std::size_t n = side * side;
    const std::size_t max_degree = 5;
    std::set<EdgeKey> edges;
    std::vector<std::size_t> degree(n, 0);
    for (auto& [e, phi] : w.instance.edges())
    {
        edges.insert(e);
        ++degree[e.lo];
        ++degree[e.hi];
    }
    Rng rng(seed, 0);
    const std::size_t fields = per_batch / 2;
    for (std::size_t b = 0; b < num_batches; ++b)
    {
        UpdateBatch batch;
        for (std::size_t i = 0; i < fields; ++i)
        {
            VertexId v = rng.uniform_index(n);
            batch.records.push_back(SetVertexPotential{v, ising_field(rng.uniform01() - 0.5)});
        }
        for (std::size_t i = fields; i < per_batch; ++i)
        {
            VertexId u = rng.uniform_index(n);
            VertexId v = rng.uniform_index(n);
            if (u == v)
                v = (u + 1) % n;
            EdgeKey e = EdgeKey::of(u, v);
            if (edges.count(e))
            {
                edges.erase(e);
                --degree[u];
                --degree[v];
                batch.records.push_back(DeleteEdge{e});
            }
            else if (degree[u] < max_degree && degree[v] < max_degree)
            {
                edges.insert(e);
                ++degree[u];
                ++degree[v];
                batch.records.push_back(AddEdge{e, ising_coupling(beta)});
            }
            else
            {
                // Both endpoints saturated: drop one of u's edges instead
                auto it = edges.lower_bound(EdgeKey{u, u});
                EdgeKey drop = (it != edges.end() && it->lo == u) ? *it : *edges.begin();
                edges.erase(drop);
                --degree[drop.lo];
                --degree[drop.hi];
                batch.records.push_back(DeleteEdge{drop});
            }
        }
        w.batches.push_back(std::move(batch));
    }
    return w;
}

BenchReport cmd_bench(const RunConfig& config)
{
    MrfInstance inst;
    std::vector<UpdateBatch> batches;
    ChainSet::Options opts;
    opts.threads = config.threads;
    opts.edge_order = config.edge_order;
    if (config.instance_path.empty())
    {
        auto w = torus_workload(100, 0.1, 10, 20, config.seed);
        inst = std::move(w.instance);
        batches = std::move(w.batches);
    }
    else
    {
        inst = parse_instance_file(config.instance_path);
        if (!config.updates_path.empty())
            batches = parse_update_stream_file(config.updates_path, inst.q());
    }
    opts.schedule = checked_schedule(config.schedule, inst.num_vertices());
    opts.params = resolve_params(inst, config.delta, config.seed);
    auto report = run_bench(inst, batches, opts, config.baseline_every);
    auto out = open_out(config.out_dir, "bench.json");
    out << report.to_json().dump(2) << '\n';
    return report;
}

}  // namespace dyngibbs
