#include "dyngibbs/io.hpp"

#include <fstream>
#include <sstream>

namespace dyngibbs
{
namespace
{
double weight_from_json(const Json& x, const std::string& where)
{
    if (x.is_number())
        return x.get<double>();
    if (x.is_string() && x.get<std::string>() == "-inf")
        return kNegInf;
    fail(Errc::parse_error, where + ": expected a number or \"-inf\"");
}

Json weight_to_json(double w)
{
    return w == kNegInf ? Json("-inf") : Json(w);
}

const Json& field(const Json& obj, const char* key, const std::string& where)
{
    if (!obj.is_object() || !obj.contains(key))
        fail(Errc::parse_error, where + ": missing field '" + key + "'");
    return obj.at(key);
}

std::uint64_t id_from_json(const Json& x, const std::string& where)
{
    if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<std::int64_t>() >= 0))
        fail(Errc::parse_error, where + ": expected a nonnegative integer id");
    return x.get<std::uint64_t>();
}

VertexPotential vertex_phi(const Json& x, int q, const std::string& where)
{
    if (!x.is_array())
        fail(Errc::parse_error, where + ": expected an array");
    if (x.size() != std::size_t(q))
        fail(Errc::bad_arity, where + ": expected " + std::to_string(q) + " entries");
    std::vector<double> w;
    for (std::size_t c = 0; c < x.size(); ++c)
        w.push_back(weight_from_json(x[c], where + "[" + std::to_string(c) + "]"));
    return VertexPotential(std::move(w));
}

EdgePotential edge_phi(const Json& x, int q, const std::string& where)
{
    if (!x.is_array())
        fail(Errc::parse_error, where + ": expected an array of rows");
    if (x.size() != std::size_t(q))
        fail(Errc::bad_arity, where + ": expected " + std::to_string(q) + " rows");
    std::vector<double> w;
    for (std::size_t a = 0; a < x.size(); ++a)
    {
        const std::string row = where + "[" + std::to_string(a) + "]";
        if (!x[a].is_array() || x[a].size() != std::size_t(q))
            fail(Errc::bad_arity, row + ": expected " + std::to_string(q) + " entries");
        for (std::size_t b = 0; b < x[a].size(); ++b)
            w.push_back(weight_from_json(x[a][b], row + "[" + std::to_string(b) + "]"));
    }
    return EdgePotential(q, std::move(w));
}

Json vertex_phi_json(const VertexPotential& phi)
{
    Json out = Json::array();
    for (std::size_t c = 0; c < phi.size(); ++c)
        out.push_back(weight_to_json(phi[c]));
    return out;
}

Json edge_phi_json(const EdgePotential& phi)
{
    Json out = Json::array();
    for (int a = 0; a < phi.q(); ++a)
    {
        Json row = Json::array();
        for (int b = 0; b < phi.q(); ++b)
            row.push_back(weight_to_json(phi(a, b)));
        out.push_back(row);
    }
    return out;
}

EdgeKey edge_key(const Json& obj, const std::string& where)
{
    auto u = id_from_json(field(obj, "u", where), where + ".u");
    auto v = id_from_json(field(obj, "v", where), where + ".v");
    if (u == v)
        fail(Errc::parse_error, where + ": self-loop");
    return EdgeKey::of(u, v);
}

Json read_json(std::istream& in, const std::string& what)
{
    try
    {
        return Json::parse(in);
    }
    catch (const Json::parse_error& e)
    {
        fail(Errc::parse_error, what + ": " + e.what());
    }
}

std::ifstream open_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail(Errc::parse_error, "cannot open " + path);
    return in;
}
}  // namespace

//---------------------------------------------------------------------------//
MrfInstance instance_from_json(const Json& doc)
{
    const Json& qj = field(doc, "q", "instance");
    if (!qj.is_number_integer())
        fail(Errc::parse_error, "instance.q: expected an integer");
    const int q = qj.get<int>();
    if (q < 2)
        fail(Errc::parse_error, "instance.q: must be at least 2");
    const Json& vs = field(doc, "vertices", "instance");
    const Json& es = field(doc, "edges", "instance");
    if (!vs.is_array() || !es.is_array())
        fail(Errc::parse_error, "instance: vertices and edges must be arrays");

    std::vector<std::pair<VertexId, VertexPotential>> vertices;
    for (std::size_t i = 0; i < vs.size(); ++i)
    {
        const std::string where = "vertices[" + std::to_string(i) + "]";
        vertices.emplace_back(id_from_json(field(vs[i], "id", where), where + ".id"),
                              vertex_phi(field(vs[i], "phi", where), q, where + ".phi"));
    }
    std::vector<std::pair<EdgeKey, EdgePotential>> edges;
    for (std::size_t i = 0; i < es.size(); ++i)
    {
        const std::string where = "edges[" + std::to_string(i) + "]";
        edges.emplace_back(edge_key(es[i], where),
                           edge_phi(field(es[i], "phi", where), q, where + ".phi"));
    }
    return MrfInstance::build(q, std::move(vertices), std::move(edges));
}

Json instance_to_json(const MrfInstance& inst)
{
    Json vs = Json::array();
    for (auto& [id, phi] : inst.vertex_map())
        vs.push_back({{"id", id}, {"phi", vertex_phi_json(*phi)}});
    Json es = Json::array();
    for (auto& [key, phi] : inst.edges())
        es.push_back({{"u", key.lo}, {"v", key.hi}, {"phi", edge_phi_json(*phi)}});
    return {{"q", inst.q()}, {"vertices", vs}, {"edges", es}};
}

MrfInstance parse_instance(std::istream& in)
{
    return instance_from_json(read_json(in, "instance"));
}

MrfInstance parse_instance_file(const std::string& path)
{
    auto in = open_file(path);
    return parse_instance(in);
}

//---------------------------------------------------------------------------//
UpdateBatch batch_from_json(const Json& doc, int q)
{
    const Json& ops = field(doc, "ops", "batch");
    if (!ops.is_array())
        fail(Errc::parse_error, "batch.ops: expected an array");
    UpdateBatch batch;
    for (std::size_t i = 0; i < ops.size(); ++i)
    {
        const std::string where = "ops[" + std::to_string(i) + "]";
        const Json& o = ops[i];
        const Json& kind = field(o, "op", where);
        if (!kind.is_string())
            fail(Errc::parse_error, where + ".op: expected a string");
        const std::string k = kind.get<std::string>();
        if (k == "set_vertex_phi" || k == "add_vertex")
        {
            auto id = id_from_json(field(o, "id", where), where + ".id");
            auto phi = vertex_phi(field(o, "phi", where), q, where + ".phi");
            if (k == "add_vertex")
                batch.records.push_back(AddVertex{id, std::move(phi)});
            else
                batch.records.push_back(SetVertexPotential{id, std::move(phi)});
        }
        else if (k == "del_vertex")
        {
            batch.records.push_back(DeleteVertex{id_from_json(field(o, "id", where), where + ".id")});
        }
        else if (k == "set_edge_phi" || k == "add_edge")
        {
            auto e = edge_key(o, where);
            auto phi = edge_phi(field(o, "phi", where), q, where + ".phi");
            if (k == "add_edge")
                batch.records.push_back(AddEdge{e, std::move(phi)});
            else
                batch.records.push_back(SetEdgePotential{e, std::move(phi)});
        }
        else if (k == "del_edge")
        {
            batch.records.push_back(DeleteEdge{edge_key(o, where)});
        }
        else
        {
            fail(Errc::parse_error, where + ".op: unknown operation '" + k + "'");
        }
    }
    return batch;
}

Json batch_to_json(const UpdateBatch& batch)
{
    Json ops = Json::array();
    for (const auto& rec : batch.records)
    {
        std::visit(
            [&](const auto& r) {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, AddVertex>)
                    ops.push_back({{"op", "add_vertex"}, {"id", r.id}, {"phi", vertex_phi_json(r.phi)}});
                else if constexpr (std::is_same_v<R, SetVertexPotential>)
                    ops.push_back({{"op", "set_vertex_phi"}, {"id", r.id}, {"phi", vertex_phi_json(r.phi)}});
                else if constexpr (std::is_same_v<R, DeleteVertex>)
                    ops.push_back({{"op", "del_vertex"}, {"id", r.id}});
                else if constexpr (std::is_same_v<R, AddEdge>)
                    ops.push_back({{"op", "add_edge"}, {"u", r.edge.lo}, {"v", r.edge.hi},
                                   {"phi", edge_phi_json(r.phi)}});
                else if constexpr (std::is_same_v<R, SetEdgePotential>)
                    ops.push_back({{"op", "set_edge_phi"}, {"u", r.edge.lo}, {"v", r.edge.hi},
                                   {"phi", edge_phi_json(r.phi)}});
                else
                    ops.push_back({{"op", "del_edge"}, {"u", r.edge.lo}, {"v", r.edge.hi}});
            },
            rec);
    }
    return {{"ops", ops}};
}

std::vector<UpdateBatch> parse_update_stream(std::istream& in, int q)
{
    std::vector<UpdateBatch> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try
        {
            out.push_back(batch_from_json(Json::parse(line), q));
        }
        catch (const Json::exception& e)
        {
            fail(Errc::parse_error, "line " + std::to_string(lineno) + ": " + e.what());
        }
        catch (const Error& e)
        {
            fail(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<UpdateBatch> parse_update_stream_file(const std::string& path, int q)
{
    auto in = open_file(path);
    return parse_update_stream(in, q);
}

//---------------------------------------------------------------------------//
std::vector<Query> parse_queries(std::istream& in)
{
    Json doc = read_json(in, "queries");
    if (!doc.is_array())
        fail(Errc::parse_error, "queries: expected an array");
    std::vector<Query> out;
    for (std::size_t i = 0; i < doc.size(); ++i)
    {
        const std::string where = "queries[" + std::to_string(i) + "]";
        const Json& o = doc[i];
        Query q;
        const Json& kind = field(o, "kind", where);
        std::string k = kind.is_string() ? kind.get<std::string>() : "";
        if (k == "marginal")
            q.kind = QueryKind::marginal;
        else if (k == "posterior")
            q.kind = QueryKind::posterior;
        else if (k == "map")
            q.kind = QueryKind::map;
        else
            fail(Errc::parse_error, where + ".kind: expected marginal, posterior, or map");
        auto ids = [&](const char* key) {
            std::vector<VertexId> v;
            if (!o.contains(key))
                return v;
            if (!o.at(key).is_array())
                fail(Errc::parse_error, where + "." + key + ": expected an array");
            for (const auto& x : o.at(key))
                v.push_back(id_from_json(x, where + "." + key));
            return v;
        };
        q.a = ids("a");
        q.b = ids("b");
        for (VertexId s : ids("tau_b"))
            q.tau_b.push_back(static_cast<Spin>(s));
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<Query> parse_queries_file(const std::string& path)
{
    auto in = open_file(path);
    return parse_queries(in);
}

}  // namespace dyngibbs
