#include "dyngibbs/models.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace dyngibbs
{
Graph path_graph(std::size_t n)
{
    Graph g;
    for (std::size_t i = 0; i < n; ++i)
        g.vertices.push_back(i);
    for (std::size_t i = 0; i + 1 < n; ++i)
        g.edges.push_back({i, i + 1});
    return g;
}

Graph cycle_graph(std::size_t n)
{
    Graph g = path_graph(n);
    if (n >= 3)
        g.edges.push_back(EdgeKey::of(0, n - 1));
    return g;
}

Graph complete_graph(std::size_t n)
{
    Graph g;
    for (std::size_t i = 0; i < n; ++i)
        g.vertices.push_back(i);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            g.edges.push_back({i, j});
    return g;
}

Graph torus_graph(std::size_t w, std::size_t h)
{
    if (w < 3 || h < 3)
        fail(Errc::invalid_argument, "torus sides must be at least 3");
    Graph g;
    std::set<EdgeKey> edges;
    for (std::size_t y = 0; y < h; ++y)
    {
        for (std::size_t x = 0; x < w; ++x)
        {
            VertexId v = y * w + x;
            g.vertices.push_back(v);
            edges.insert(EdgeKey::of(v, y * w + (x + 1) % w));
            edges.insert(EdgeKey::of(v, ((y + 1) % h) * w + x));
        }
    }
    g.edges.assign(edges.begin(), edges.end());
    return g;
}

Graph random_bounded_degree_graph(std::size_t n, std::size_t max_degree,
                                  std::size_t target_edges, Rng& rng)
{
    Graph g;
    for (std::size_t i = 0; i < n; ++i)
        g.vertices.push_back(i);
    if (n < 2)
        return g;
    std::vector<std::size_t> degree(n, 0);
    std::set<EdgeKey> edges;
    std::size_t attempts = 0;
    while (edges.size() < target_edges && attempts < 50 * target_edges + 100)
    {
        ++attempts;
        auto a = rng.uniform_index(n);
        auto b = rng.uniform_index(n);
        if (a == b || degree[a] >= max_degree || degree[b] >= max_degree)
            continue;
        if (edges.insert(EdgeKey::of(a, b)).second)
        {
            ++degree[a];
            ++degree[b];
        }
    }
    g.edges.assign(edges.begin(), edges.end());
    return g;
}

Graph random_regular_graph(std::size_t n, std::size_t d, Rng& rng)
{
    if ((n * d) % 2 != 0 || d >= n)
        fail(Errc::invalid_argument, "no simple d-regular graph for these sizes");
    for (int attempt = 0; attempt < 10000; ++attempt)
    {
        // Configuration model: pair up stubs, reject on loops or repeats
        std::vector<VertexId> stubs;
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t k = 0; k < d; ++k)
                stubs.push_back(v);
        for (std::size_t i = stubs.size(); i > 1; --i)
            std::swap(stubs[i - 1], stubs[rng.uniform_index(i)]);
        std::set<EdgeKey> edges;
        bool ok = true;
        for (std::size_t i = 0; ok && i < stubs.size(); i += 2)
        {
            ok = stubs[i] != stubs[i + 1]
                 && edges.insert(EdgeKey::of(stubs[i], stubs[i + 1])).second;
        }
        if (ok)
        {
            Graph g;
            for (std::size_t v = 0; v < n; ++v)
                g.vertices.push_back(v);
            g.edges.assign(edges.begin(), edges.end());
            return g;
        }
    }
    fail(Errc::invalid_argument, "random regular graph sampling gave up");
}

//---------------------------------------------------------------------------//
VertexPotential ising_field(double h)
{
    return VertexPotential({-h, h});
}

EdgePotential ising_coupling(double beta)
{
    return EdgePotential(2, {beta, -beta, -beta, beta});
}

MrfInstance ising_model(const Graph& g, double beta, double field)
{
    std::vector<double> fields(g.vertices.size(), field);
    return ising_model(g, beta, fields);
}

MrfInstance ising_model(const Graph& g, double beta, std::span<const double> fields)
{
    if (fields.size() != g.vertices.size())
        fail(Errc::invalid_argument, "one field per vertex required");
    std::vector<std::pair<VertexId, VertexPotential>> vs;
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
        vs.emplace_back(g.vertices[i], ising_field(fields[i]));
    std::vector<std::pair<EdgeKey, EdgePotential>> es;
    for (auto e : g.edges)
        es.emplace_back(e, ising_coupling(beta));
    return MrfInstance::build(2, std::move(vs), std::move(es));
}

VertexPotential hardcore_vertex(double lambda)
{
    if (!(lambda > 0))
        fail(Errc::invalid_argument, "fugacity must be positive");
    return VertexPotential({0.0, std::log(lambda)});
}

EdgePotential hardcore_edge()
{
    return EdgePotential(2, {0.0, 0.0, 0.0, kNegInf});
}

MrfInstance hardcore_model(const Graph& g, double lambda)
{
    std::vector<std::pair<VertexId, VertexPotential>> vs;
    for (auto v : g.vertices)
        vs.emplace_back(v, hardcore_vertex(lambda));
    std::vector<std::pair<EdgeKey, EdgePotential>> es;
    for (auto e : g.edges)
        es.emplace_back(e, hardcore_edge());
    return MrfInstance::build(2, std::move(vs), std::move(es));
}

VertexPotential uniform_vertex(int q)
{
    return VertexPotential(std::vector<double>(q, 0.0));
}

EdgePotential coloring_edge(int q)
{
    std::vector<double> w(std::size_t(q) * q, 0.0);
    for (int c = 0; c < q; ++c)
        w[c * q + c] = kNegInf;
    return EdgePotential(q, std::move(w));
}

MrfInstance coloring_model(const Graph& g, int q)
{
    std::vector<std::pair<VertexId, VertexPotential>> vs;
    for (auto v : g.vertices)
        vs.emplace_back(v, uniform_vertex(q));
    std::vector<std::pair<EdgeKey, EdgePotential>> es;
    for (auto e : g.edges)
        es.emplace_back(e, coloring_edge(q));
    return MrfInstance::build(q, std::move(vs), std::move(es));
}

ModelKind parse_model_kind(const std::string& name)
{
    if (name == "ising")
        return ModelKind::ising;
    if (name == "hardcore")
        return ModelKind::hardcore;
    if (name == "coloring")
        return ModelKind::coloring;
    fail(Errc::invalid_argument, "unknown model '" + name + "'");
}

//---------------------------------------------------------------------------//
bool ising_in_regime(double beta, std::size_t max_degree)
{
    double d = static_cast<double>(max_degree);
    return std::exp(-2 * std::fabs(beta)) > 1.0 - 2.0 / (d + 1.0);
}

bool hardcore_in_regime(double lambda, std::size_t max_degree)
{
    if (max_degree <= 2)
        return true;
    return lambda < 2.0 / (static_cast<double>(max_degree) - 2.0);
}

bool coloring_in_regime(int q, std::size_t max_degree)
{
    return static_cast<double>(q) > 2.0 * static_cast<double>(max_degree);
}

namespace
{
[[noreturn]] void not_model(const char* name)
{
    fail(Errc::regime_violation, std::string("instance is not a ") + name + " model");
}

MixingBound from_row_sums(const std::vector<double>& rows, const char* name)
{
    double worst = 0;
    for (double r : rows)
        worst = std::max(worst, r);
    if (!(worst < 1.0))
        fail(Errc::regime_violation,
             std::string(name) + " influence row sum " + std::to_string(worst)
                 + " is not below 1");
    MixingBound b;
    b.delta = std::min(1.0 - worst, 0.999);
    return b;
}
}  // namespace

MixingBound model_regime_bound(ModelKind kind, const MrfInstance& inst)
{
    const std::size_t n = inst.num_vertices();
    std::vector<double> rows(n, 0.0);
    switch (kind)
    {
        case ModelKind::ising: {
            if (inst.q() != 2)
                not_model("ising");
            for (std::uint32_t i = 0; i < n; ++i)
            {
                auto view = inst.local_at(i);
                auto w = view.potential().weights();
                if (w[0] == kNegInf || w[1] == kNegInf)
                    not_model("ising");
                for (auto& nb : view.neighbors())
                {
                    auto& e = *nb.potential;
                    for (double x : e.weights())
                        if (x == kNegInf)
                            not_model("ising");
                    double j = (e(0, 0) + e(1, 1) - e(0, 1) - e(1, 0)) / 4;
                    // Influence of the neighbor on this vertex
                    rows[inst.index_of(nb.id)] += std::tanh(std::fabs(j));
                }
            }
            return from_row_sums(rows, "ising");
        }
        case ModelKind::hardcore: {
            if (!is_hardcore_like(inst))
                not_model("hardcore");
            double lambda_max = 0;
            for (std::uint32_t i = 0; i < n; ++i)
            {
                auto view = inst.local_at(i);
                double lambda = std::exp(view.potential()[1] - view.potential()[0]);
                lambda_max = std::max(lambda_max, lambda);
                for (auto& nb : view.neighbors())
                    rows[inst.index_of(nb.id)] += lambda / (1 + lambda);
            }
            double worst = 0;
            for (double r : rows)
                worst = std::max(worst, r);
            if (worst < 1.0)
                return from_row_sums(rows, "hardcore");
            // Beyond the influence-matrix bound but inside the fugacity regime
            std::size_t delta_max = std::max<std::size_t>(inst.max_degree(), 1);
            if (!hardcore_in_regime(lambda_max, delta_max))
                fail(Errc::regime_violation, "hardcore fugacity outside regime");
            MixingBound b;
            b.delta = std::min(2.0 - lambda_max * (double(delta_max) - 2.0), 0.999);
            b.scale = 96.0;
            b.log_factor = static_cast<double>(delta_max);
            return b;
        }
        case ModelKind::coloring: {
            const int q = inst.q();
            for (std::uint32_t i = 0; i < n; ++i)
            {
                auto view = inst.local_at(i);
                auto w = view.potential().weights();
                if (std::any_of(w.begin(), w.end(),
                                [&](double x) { return x != w[0] || x == kNegInf; }))
                    not_model("coloring");
                for (auto& nb : view.neighbors())
                {
                    for (int a = 0; a < q; ++a)
                        for (int c = 0; c < q; ++c)
                            if ((*nb.potential)(a, c) != (a == c ? kNegInf : 0.0))
                                not_model("coloring");
                }
                std::size_t d = view.degree();
                if (d == 0)
                    continue;
                if (std::size_t(q) <= d)
                    fail(Errc::regime_violation, "coloring has q <= degree");
                for (auto& nb : view.neighbors())
                    rows[inst.index_of(nb.id)] += 1.0 / double(q - d);
            }
            return from_row_sums(rows, "coloring");
        }
    }
    fail(Errc::invalid_argument, "unknown model kind");
}

bool is_hardcore_like(const MrfInstance& inst)
{
    if (inst.q() != 2 || inst.num_edges() == 0)
        return false;
    for (auto& [key, phi] : inst.edges())
    {
        auto& e = *phi;
        if (e(0, 0) != 0 || e(0, 1) != 0 || e(1, 1) != kNegInf)
            return false;
    }
    for (auto& [id, phi] : inst.vertex_map())
    {
        if ((*phi)[0] == kNegInf || (*phi)[1] == kNegInf)
            return false;
    }
    return true;
}

}  // namespace dyngibbs
