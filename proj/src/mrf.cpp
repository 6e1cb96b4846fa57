#include "dyngibbs/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dyngibbs
{
const char* to_string(Errc code)
{
    switch (code)
    {
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::infeasible_neighborhood: return "InfeasibleNeighborhood";
        case Errc::missing_boundary: return "MissingBoundary";
        case Errc::domain_mismatch: return "DomainMismatch";
        case Errc::degree_too_large: return "DegreeTooLarge";
        case Errc::unknown_vertex: return "UnknownVertex";
        case Errc::not_normalized: return "NotNormalized";
        case Errc::zero_probability_condition: return "ZeroProbabilityCondition";
        case Errc::neighbor_mismatch: return "NeighborMismatch";
        case Errc::rank_out_of_range: return "RankOutOfRange";
        case Errc::vertex_has_transitions: return "VertexHasTransitions";
        case Errc::infeasible_instance: return "InfeasibleInstance";
        case Errc::graph_mismatch: return "GraphMismatch";
        case Errc::vertex_set_mismatch: return "VertexSetMismatch";
        case Errc::shared_potential_mismatch: return "SharedPotentialMismatch";
        case Errc::not_isolated: return "NotIsolated";
        case Errc::empty_posterior_condition: return "EmptyPosteriorCondition";
        case Errc::diff_inconsistent: return "DiffInconsistent";
        case Errc::too_large: return "TooLarge";
        case Errc::space_mismatch: return "SpaceMismatch";
        case Errc::parse_error: return "ParseError";
        case Errc::asymmetric_edge: return "AsymmetricEdge";
        case Errc::bad_arity: return "BadArity";
        case Errc::invalid_batch: return "InvalidBatch";
        case Errc::regime_violation: return "RegimeViolation";
    }
    return "Unknown";
}

namespace
{
void check_log_weights(std::span<const double> w, const char* what)
{
    for (double x : w)
    {
        if (std::isnan(x) || x == std::numeric_limits<double>::infinity())
        {
            fail(Errc::invalid_argument,
                 std::string(what) + " contains NaN or +inf");
        }
    }
}
}  // namespace

SpinDomain::SpinDomain(int q) : q_(q)
{
    if (q < 2)
        fail(Errc::invalid_argument, "spin domain needs q >= 2");
}

VertexPotential::VertexPotential(std::vector<double> weights)
    : w_(std::move(weights))
{
    check_log_weights(w_, "vertex potential");
}

EdgePotential::EdgePotential(int q, std::vector<double> weights)
    : q_(q), w_(std::move(weights))
{
    if (q < 2 || w_.size() != std::size_t(q) * q)
        fail(Errc::bad_arity, "edge potential must be q*q");
    check_log_weights(w_, "edge potential");
    for (int a = 0; a < q; ++a)
    {
        for (int b = a + 1; b < q; ++b)
        {
            if (w_[a * q + b] != w_[b * q + a])
                fail(Errc::asymmetric_edge, "edge potential is not symmetric");
        }
    }
}

EdgeKey EdgeKey::of(VertexId a, VertexId b)
{
    if (a == b)
        fail(Errc::invalid_argument, "self-loop on vertex " + std::to_string(a));
    return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

//---------------------------------------------------------------------------//
void normalize_log_weights(std::span<double> w)
{
    double m = kNegInf;
    for (double x : w)
        m = std::max(m, x);
    if (m == kNegInf)
        fail(Errc::infeasible_neighborhood, "all spins have zero weight");
    double total = 0;
    for (double& x : w)
    {
        x = (x == kNegInf) ? 0.0 : std::exp(x - m);
        total += x;
    }
    for (double& x : w)
        x /= total;
}

void LocalView::marginal(std::span<const Spin> nbr_spins,
                         std::span<double> out) const
{
    for (int c = 0; c < q_; ++c)
    {
        double acc = (*phi_)[c];
        for (std::size_t k = 0; k < nbrs_.size(); ++k)
            acc += (*nbrs_[k].potential)(nbr_spins[k], c);
        out[c] = acc;
    }
    normalize_log_weights(out.first(q_));
}

std::vector<double> LocalView::marginal(std::span<const Spin> nbr_spins) const
{
    std::vector<double> out(q_);
    this->marginal(nbr_spins, out);
    return out;
}

//---------------------------------------------------------------------------//
MrfInstance::MrfInstance(int q)
{
    SpinDomain check(q);
    auto d = std::make_shared<Data>();
    d->q = q;
    d_ = std::move(d);
}

MrfInstance MrfInstance::build(int q, VertexMap vertices, EdgeMap edges)
{
    SpinDomain check(q);
    auto d = std::make_shared<Data>();
    d->q = q;
    d->ids.reserve(vertices.size());
    d->vpot.reserve(vertices.size());
    for (auto& [id, phi] : vertices)
    {
        if (!phi || phi->size() != std::size_t(q))
            fail(Errc::bad_arity,
                 "vertex " + std::to_string(id) + " potential must have q entries");
        d->index.emplace(id, static_cast<std::uint32_t>(d->ids.size()));
        d->ids.push_back(id);
        d->vpot.push_back(phi);
    }
    d->adj.resize(d->ids.size());
    for (auto& [key, phi] : edges)
    {
        if (!phi || phi->q() != q)
            fail(Errc::bad_arity, "edge potential arity differs from q");
        if (key.lo >= key.hi)
            fail(Errc::invalid_argument, "edge key must satisfy lo < hi");
        auto a = d->index.find(key.lo);
        auto b = d->index.find(key.hi);
        if (a == d->index.end() || b == d->index.end())
            fail(Errc::invalid_argument,
                 "edge {" + std::to_string(key.lo) + "," + std::to_string(key.hi)
                     + "} has a missing endpoint");
        d->adj[a->second].push_back({key.hi, phi.get()});
        d->adj[b->second].push_back({key.lo, phi.get()});
    }
    d->adj_index.resize(d->adj.size());
    for (std::size_t i = 0; i < d->adj.size(); ++i)
    {
        d->adj_index[i].reserve(d->adj[i].size());
        for (auto& nb : d->adj[i])
            d->adj_index[i].push_back(d->index.at(nb.id));
    }
    for (auto& nb : d->adj)
        d->max_degree = std::max(d->max_degree, nb.size());
    d->vertices = std::move(vertices);
    d->edges = std::move(edges);

    MrfInstance result(q);
    result.d_ = std::move(d);
    return result;
}

MrfInstance
MrfInstance::build(int q, std::vector<std::pair<VertexId, VertexPotential>> vertices,
                   std::vector<std::pair<EdgeKey, EdgePotential>> edges)
{
    VertexMap vm;
    for (auto& [id, phi] : vertices)
    {
        if (!vm.emplace(id, std::make_shared<const VertexPotential>(std::move(phi))).second)
            fail(Errc::invalid_argument, "duplicate vertex " + std::to_string(id));
    }
    EdgeMap em;
    for (auto& [key, phi] : edges)
    {
        auto k = EdgeKey::of(key.lo, key.hi);
        if (!em.emplace(k, std::make_shared<const EdgePotential>(std::move(phi))).second)
            fail(Errc::invalid_argument, "parallel edge");
    }
    return build(q, std::move(vm), std::move(em));
}

std::uint32_t MrfInstance::index_of(VertexId v) const
{
    auto it = d_->index.find(v);
    if (it == d_->index.end())
        fail(Errc::unknown_vertex, "vertex " + std::to_string(v));
    return it->second;
}

const VertexPotential& MrfInstance::vertex_potential(VertexId v) const
{
    return *d_->vpot[this->index_of(v)];
}

const EdgePotential* MrfInstance::edge_potential(EdgeKey e) const
{
    auto it = d_->edges.find(e);
    return it == d_->edges.end() ? nullptr : it->second.get();
}

//---------------------------------------------------------------------------//
std::vector<double> conditional_marginal(const MrfInstance& inst, VertexId v,
                                         const std::map<VertexId, Spin>& boundary)
{
    auto view = inst.local(v);
    std::vector<Spin> spins;
    spins.reserve(view.degree());
    for (auto& nb : view.neighbors())
    {
        auto it = boundary.find(nb.id);
        if (it == boundary.end())
            fail(Errc::missing_boundary, "neighbor " + std::to_string(nb.id)
                                             + " of " + std::to_string(v)
                                             + " is unassigned");
        if (it->second >= inst.q())
            fail(Errc::invalid_argument, "boundary spin out of range");
        spins.push_back(it->second);
    }
    return view.marginal(spins);
}

double l1_log_distance(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        fail(Errc::invalid_argument, "potential sizes differ");
    double total = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        bool fa = a[i] != kNegInf;
        bool fb = b[i] != kNegInf;
        if (fa != fb)
            return std::numeric_limits<double>::infinity();
        if (fa)
            total += std::fabs(a[i] - b[i]);
    }
    return total;
}

InstanceDiff instance_diff(const MrfInstance& a, const MrfInstance& b)
{
    if (a.q() != b.q())
        fail(Errc::domain_mismatch, "spin domains differ");
    InstanceDiff d;
    auto merge = [&d](const auto& ma, const auto& mb) {
        auto ia = ma.begin();
        auto ib = mb.begin();
        while (ia != ma.end() || ib != mb.end())
        {
            if (ib == mb.end() || (ia != ma.end() && ia->first < ib->first))
            {
                d.d_graph += 1;
                ++ia;
            }
            else if (ia == ma.end() || ib->first < ia->first)
            {
                d.d_graph += 1;
                ++ib;
            }
            else
            {
                if (ia->second != ib->second)
                    d.d_ham += l1_log_distance(ia->second->weights(),
                                               ib->second->weights());
                ++ia;
                ++ib;
            }
        }
    };
    merge(a.vertex_map(), b.vertex_map());
    merge(a.edges(), b.edges());
    d.d_total = d.d_graph + d.d_ham;
    return d;
}

//---------------------------------------------------------------------------//
namespace
{
std::size_t checked_power(std::size_t q, std::size_t d, double cap)
{
    double total = std::pow(double(q), double(d));
    if (total > cap)
        fail(Errc::degree_too_large, "boundary enumeration q^deg too large");
    return static_cast<std::size_t>(total + 0.5);
}

// Decode a base-q boundary index with neighbor 0 as the least significant digit
void decode(std::size_t idx, int q, std::span<Spin> out)
{
    for (auto& s : out)
    {
        s = static_cast<Spin>(idx % q);
        idx /= q;
    }
}
}  // namespace

std::optional<FeasibilityViolation>
validate_feasibility(const MrfInstance& inst, double max_enumeration)
{
    const int q = inst.q();
    std::vector<Spin> spins;
    for (std::uint32_t i = 0; i < inst.num_vertices(); ++i)
    {
        auto view = inst.local_at(i);
        // A spin that no neighbor can forbid makes every boundary feasible
        bool permissive = false;
        for (int c = 0; c < q && !permissive; ++c)
        {
            if (view.potential()[c] == kNegInf)
                continue;
            bool ok = true;
            for (auto& nb : view.neighbors())
            {
                for (int a = 0; a < q && ok; ++a)
                    ok = (*nb.potential)(a, c) != kNegInf;
            }
            permissive = ok;
        }
        if (permissive)
            continue;

        std::size_t total = checked_power(q, view.degree(), max_enumeration);
        spins.assign(view.degree(), 0);
        for (std::size_t idx = 0; idx < total; ++idx)
        {
            decode(idx, q, spins);
            bool any = false;
            for (int c = 0; c < q && !any; ++c)
            {
                double acc = view.potential()[c];
                for (std::size_t k = 0; k < spins.size(); ++k)
                    acc += (*view.neighbors()[k].potential)(spins[k], c);
                any = acc != kNegInf;
            }
            if (!any)
            {
                FeasibilityViolation bad{view.center(), {}};
                for (std::size_t k = 0; k < spins.size(); ++k)
                    bad.boundary[view.neighbors()[k].id] = spins[k];
                return bad;
            }
        }
    }
    return std::nullopt;
}

double tv_distance(std::span<const double> p, std::span<const double> q)
{
    if (p.size() != q.size())
        fail(Errc::invalid_argument, "distribution sizes differ");
    double total = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        total += std::fabs(p[i] - q[i]);
    return 0.5 * total;
}

DobrushinReport dobrushin_check(const MrfInstance& inst, std::size_t degree_cap)
{
    const int q = inst.q();
    DobrushinReport report;
    report.row_sums.assign(inst.num_vertices(), 0.0);
    std::vector<Spin> spins;
    std::vector<double> marg;
    std::vector<double> influence;
    for (std::uint32_t i = 0; i < inst.num_vertices(); ++i)
    {
        auto view = inst.local_at(i);
        const std::size_t d = view.degree();
        if (d > degree_cap)
            fail(Errc::degree_too_large,
                 "vertex " + std::to_string(view.center()) + " has degree "
                     + std::to_string(d));
        if (d == 0)
            continue;
        std::size_t total = checked_power(q, d, 1e9);
        marg.resize(total * q);
        spins.assign(d, 0);
        for (std::size_t idx = 0; idx < total; ++idx)
        {
            decode(idx, q, spins);
            view.marginal(spins, std::span<double>(marg).subspan(idx * q, q));
        }
        influence.assign(d, 0.0);
        for (std::size_t idx = 0; idx < total; ++idx)
        {
            std::span<const double> p(marg.data() + idx * q, q);
            std::size_t rest = idx;
            std::size_t place = 1;
            for (std::size_t k = 0; k < d; ++k)
            {
                std::size_t digit = rest % q;
                rest /= q;
                for (std::size_t c = digit + 1; c < std::size_t(q); ++c)
                {
                    std::size_t other = idx + (c - digit) * place;
                    std::span<const double> r(marg.data() + other * q, q);
                    influence[k] = std::max(influence[k], tv_distance(p, r));
                }
                place *= q;
            }
        }
        for (std::size_t k = 0; k < d; ++k)
            report.row_sums[inst.index_of(view.neighbors()[k].id)] += influence[k];
    }
    double worst = 0;
    for (double r : report.row_sums)
        worst = std::max(worst, r);
    report.delta = 1.0 - worst;
    report.satisfied = report.delta > 0;
    return report;
}

//---------------------------------------------------------------------------//
MrfInstance apply_batch(const MrfInstance& inst, const UpdateBatch& batch)
{
    const int q = inst.q();
    auto vertices = inst.vertex_map();
    auto edges = inst.edges();
    std::unordered_map<VertexId, std::size_t> degree;
    for (auto& [key, phi] : edges)
    {
        ++degree[key.lo];
        ++degree[key.hi];
    }
    auto bad = [](const std::string& msg) { fail(Errc::invalid_batch, msg); };
    auto id_str = [](VertexId v) { return std::to_string(v); };
    auto edge_str = [](EdgeKey e) {
        return "{" + std::to_string(e.lo) + "," + std::to_string(e.hi) + "}";
    };
    auto check_vertex_arity = [&](const VertexPotential& phi) {
        if (phi.size() != std::size_t(q))
            fail(Errc::bad_arity, "vertex potential must have q entries");
    };
    auto check_edge_arity = [&](const EdgePotential& phi) {
        if (phi.q() != q)
            fail(Errc::bad_arity, "edge potential must be q*q");
    };

    for (const auto& rec : batch.records)
    {
        std::visit(
            [&](const auto& r) {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, AddVertex>)
                {
                    check_vertex_arity(r.phi);
                    if (vertices.count(r.id))
                        bad("add_vertex: " + id_str(r.id) + " already exists");
                    vertices.emplace(r.id, std::make_shared<const VertexPotential>(r.phi));
                }
                else if constexpr (std::is_same_v<R, DeleteVertex>)
                {
                    if (!vertices.count(r.id))
                        bad("del_vertex: " + id_str(r.id) + " does not exist");
                    auto it = degree.find(r.id);
                    if (it != degree.end() && it->second > 0)
                        bad("del_vertex: " + id_str(r.id) + " is not isolated");
                    vertices.erase(r.id);
                }
                else if constexpr (std::is_same_v<R, AddEdge>)
                {
                    check_edge_arity(r.phi);
                    if (r.edge.lo >= r.edge.hi)
                        bad("add_edge: malformed edge key");
                    if (!vertices.count(r.edge.lo) || !vertices.count(r.edge.hi))
                        bad("add_edge: endpoint of " + edge_str(r.edge) + " missing");
                    if (edges.count(r.edge))
                        bad("add_edge: " + edge_str(r.edge) + " already exists");
                    edges.emplace(r.edge, std::make_shared<const EdgePotential>(r.phi));
                    ++degree[r.edge.lo];
                    ++degree[r.edge.hi];
                }
                else if constexpr (std::is_same_v<R, DeleteEdge>)
                {
                    if (!edges.erase(r.edge))
                        bad("del_edge: " + edge_str(r.edge) + " does not exist");
                    --degree[r.edge.lo];
                    --degree[r.edge.hi];
                }
                else if constexpr (std::is_same_v<R, SetVertexPotential>)
                {
                    check_vertex_arity(r.phi);
                    auto it = vertices.find(r.id);
                    if (it == vertices.end())
                        bad("set_vertex_phi: " + id_str(r.id) + " does not exist");
                    it->second = std::make_shared<const VertexPotential>(r.phi);
                }
                else if constexpr (std::is_same_v<R, SetEdgePotential>)
                {
                    check_edge_arity(r.phi);
                    auto it = edges.find(r.edge);
                    if (it == edges.end())
                        bad("set_edge_phi: " + edge_str(r.edge) + " does not exist");
                    it->second = std::make_shared<const EdgePotential>(r.phi);
                }
            },
            rec);
    }
    return MrfInstance::build(q, std::move(vertices), std::move(edges));
}

Spin sample_categorical(std::span<const double> p, double u)
{
    double acc = 0;
    int last = -1;
    for (std::size_t c = 0; c < p.size(); ++c)
    {
        if (p[c] <= 0)
            continue;
        acc += p[c];
        last = static_cast<int>(c);
        if (u < acc)
            return static_cast<Spin>(c);
    }
    if (last < 0)
        fail(Errc::not_normalized, "categorical draw from an all-zero vector");
    return static_cast<Spin>(last);
}

}  // namespace dyngibbs
