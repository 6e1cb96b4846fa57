#include <doctest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"
#include "dyngibbs/io.hpp"
#include "dyngibbs/models.hpp"

using namespace dyngibbs;

TEST_SUITE("io")
{
TEST_CASE("instances round-trip, including forbidden weights")
{
    for (const auto& inst : {ising_model(cycle_graph(5), 0.3, -0.2),
                             hardcore_model(path_graph(4), 1.5),
                             coloring_model(cycle_graph(4), 3)})
    {
        auto doc = instance_to_json(inst);
        auto back = instance_from_json(Json::parse(doc.dump()));
        CHECK(back.q() == inst.q());
        CHECK(instance_diff(inst, back).d_total == 0.0);
        CHECK(instance_to_json(back) == doc);
    }
    auto doc = instance_to_json(hardcore_model(path_graph(2), 1.0));
    CHECK(doc["edges"][0]["phi"][1][1] == "-inf");
}

TEST_CASE("fixture instance")
{
    auto inst = parse_instance_file(DYNGIBBS_FIXTURES "/ising_cycle6.json");
    CHECK(inst.num_vertices() == 6);
    CHECK(inst.num_edges() == 6);
    auto hc = parse_instance_file(DYNGIBBS_FIXTURES "/hardcore_path4.json");
    CHECK(is_hardcore_like(hc));
}

TEST_CASE("parse errors name the field")
{
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_instance(in);
    };
    CHECK(error_of([&] { parse("{"); }) == Errc::parse_error);
    CHECK(error_of([&] { parse(R"({"q": 2, "vertices": []})"); }) == Errc::parse_error);
    CHECK(error_of([&] { parse(R"({"q": 2, "vertices": [{"id": 0, "phi": [0]}], "edges": []})"); })
          == Errc::bad_arity);
    CHECK(error_of([&] { parse(R"({"q": 2, "vertices": [{"id": -1, "phi": [0, 0]}], "edges": []})"); })
          == Errc::parse_error);
    CHECK(error_of([&] { parse(R"({"q": 2, "vertices": [{"id": 0, "phi": [0, "inf"]}], "edges": []})"); })
          == Errc::parse_error);
    CHECK(error_of([] { parse_instance_file(DYNGIBBS_FIXTURES "/bad_instance.json"); })
          == Errc::parse_error);
    CHECK(error_of([] { parse_instance_file("/nonexistent/file.json"); }) == Errc::parse_error);
    try
    {
        parse(R"({"q": 2, "vertices": [{"id": 0}], "edges": []})");
    }
    catch (const Error& e)
    {
        CHECK(std::string(e.what()).find("vertices[0]") != std::string::npos);
    }
}

TEST_CASE("update streams")
{
    auto batches = parse_update_stream_file(DYNGIBBS_FIXTURES "/updates.jsonl", 2);
    REQUIRE(batches.size() == 3);
    CHECK(batches[1].records.size() == 2);
    CHECK(std::holds_alternative<AddVertex>(batches[1].records[0]));
    for (const auto& b : batches)
    {
        auto again = batch_from_json(Json::parse(batch_to_json(b).dump()), 2);
        CHECK(batch_to_json(again) == batch_to_json(b));
    }
    try
    {
        parse_update_stream_file(DYNGIBBS_FIXTURES "/bad_updates.jsonl", 2);
        FAIL("expected a parse error");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == Errc::parse_error);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("queries")
{
    auto qs = parse_queries_file(DYNGIBBS_FIXTURES "/queries.json");
    REQUIRE(qs.size() == 4);
    CHECK(qs[0].kind == QueryKind::marginal);
    CHECK(qs[1].kind == QueryKind::posterior);
    CHECK(qs[1].tau_b == std::vector<Spin>{1});
    CHECK(qs[2].kind == QueryKind::map);
    std::istringstream bad(R"([{"kind": "mode", "a": [0]}])");
    CHECK(error_of([&] { parse_queries(bad); }) == Errc::parse_error);
}
}
