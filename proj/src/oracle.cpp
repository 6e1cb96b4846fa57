#include "dyngibbs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dyngibbs
{
std::uint64_t ExactDistribution::encode(const Configuration& c) const
{
    std::uint64_t code = 0;
    for (VertexId v : vertices)
        code = code * static_cast<std::uint64_t>(q) + c.at(v);
    return code;
}

Configuration ExactDistribution::decode(std::uint64_t code) const
{
    Configuration c;
    for (std::size_t i = vertices.size(); i-- > 0;)
    {
        c[vertices[i]] = static_cast<Spin>(code % static_cast<std::uint64_t>(q));
        code /= static_cast<std::uint64_t>(q);
    }
    return c;
}

double log_weight(const MrfInstance& inst, const Configuration& c)
{
    double h = 0;
    for (auto& [v, phi] : inst.vertex_map())
        h += (*phi)[c.at(v)];
    for (auto& [e, phi] : inst.edges())
        h += (*phi)(c.at(e.lo), c.at(e.hi));
    return h;
}

ExactDistribution exact_gibbs(const MrfInstance& inst, double max_states)
{
    ExactDistribution d;
    d.q = inst.q();
    d.vertices.assign(inst.vertices().begin(), inst.vertices().end());
    double states = std::pow(static_cast<double>(d.q), static_cast<double>(d.vertices.size()));
    if (states > max_states)
        fail(Errc::too_large, "configuration space has " + std::to_string(states) + " states");
    const auto count = static_cast<std::uint64_t>(states);
    std::vector<double> h(count);
    double top = kNegInf;
    for (std::uint64_t k = 0; k < count; ++k)
    {
        h[k] = log_weight(inst, d.decode(k));
        top = std::max(top, h[k]);
    }
    if (top == kNegInf)
        fail(Errc::infeasible_instance, "every configuration has zero weight");
    d.prob.resize(count);
    double z = 0;
    for (std::uint64_t k = 0; k < count; ++k)
    {
        d.prob[k] = h[k] == kNegInf ? 0.0 : std::exp(h[k] - top);
        z += d.prob[k];
    }
    for (double& p : d.prob)
        p /= z;
    return d;
}

double exact_tv(const ExactDistribution& p, const ExactDistribution& q)
{
    if (p.q != q.q || p.vertices != q.vertices || p.prob.size() != q.prob.size())
        fail(Errc::space_mismatch, "distributions live on different spaces");
    double s = 0;
    for (std::size_t k = 0; k < p.prob.size(); ++k)
        s += std::abs(p.prob[k] - q.prob[k]);
    return s / 2;
}

std::vector<double> exact_marginal(const ExactDistribution& dist,
                                   const std::vector<VertexId>& a)
{
    std::vector<std::size_t> pos;
    for (VertexId v : a)
    {
        auto it = std::find(dist.vertices.begin(), dist.vertices.end(), v);
        if (it == dist.vertices.end())
            fail(Errc::unknown_vertex, "vertex " + std::to_string(v) + " not in distribution");
        pos.push_back(static_cast<std::size_t>(it - dist.vertices.begin()));
    }
    std::size_t dim = 1;
    for (std::size_t i = 0; i < a.size(); ++i)
        dim *= static_cast<std::size_t>(dist.q);
    std::vector<double> out(dim, 0.0);
    const std::size_t n = dist.vertices.size();
    std::vector<Spin> digits(n);
    for (std::uint64_t k = 0; k < dist.prob.size(); ++k)
    {
        std::uint64_t code = k;
        for (std::size_t i = n; i-- > 0;)
        {
            digits[i] = static_cast<Spin>(code % static_cast<std::uint64_t>(dist.q));
            code /= static_cast<std::uint64_t>(dist.q);
        }
        std::size_t idx = 0;
        for (std::size_t p : pos)
            idx = idx * static_cast<std::size_t>(dist.q) + digits[p];
        out[idx] += dist.prob[k];
    }
    return out;
}

Configuration reference_chain(const MrfInstance& inst, Rank steps, std::uint64_t seed)
{
    const int q = inst.q();
    std::vector<VertexId> ids(inst.vertices().begin(), inst.vertices().end());
    // Greedy start: each vertex takes the lowest spin compatible with
    // the vertices already placed
    Configuration x;
    for (VertexId v : ids)
    {
        for (int c = 0; c < q; ++c)
        {
            double w = inst.vertex_potential(v)[c];
            for (auto& nb : inst.neighbors(v))
            {
                auto it = x.find(nb.id);
                if (it != x.end())
                    w += (*inst.edge_potential(EdgeKey::of(nb.id, v)))(it->second, c);
            }
            if (w != kNegInf)
            {
                x[v] = static_cast<Spin>(c);
                break;
            }
        }
        if (!x.count(v))
            fail(Errc::infeasible_instance, "no feasible start spin");
    }
    if (ids.empty())
        return x;
    Rng rng(seed, 0);
    std::vector<double> w(q);
    for (Rank t = 0; t < steps; ++t)
    {
        VertexId v = ids[rng.uniform_index(ids.size())];
        double top = kNegInf;
        for (int c = 0; c < q; ++c)
        {
            w[c] = inst.vertex_potential(v)[c];
            for (auto& nb : inst.neighbors(v))
                w[c] += (*inst.edge_potential(EdgeKey::of(nb.id, v)))(x.at(nb.id), c);
            top = std::max(top, w[c]);
        }
        double z = 0;
        for (int c = 0; c < q; ++c)
        {
            w[c] = w[c] == kNegInf ? 0.0 : std::exp(w[c] - top);
            z += w[c];
        }
        double u = rng.uniform01();
        double acc = 0;
        int pick = -1;
        for (int c = 0; c < q; ++c)
        {
            w[c] /= z;
            if (w[c] <= 0)
                continue;
            acc += w[c];
            pick = c;
            if (u < acc)
                break;
        }
        x[v] = static_cast<Spin>(pick);
    }
    return x;
}

}  // namespace dyngibbs
