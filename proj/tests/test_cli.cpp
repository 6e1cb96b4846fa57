#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace
{
const std::string kFix = DYNGIBBS_FIXTURES;

int run_cli(const std::string& args)
{
    std::string cmd = std::string(DYNGIBBS_CLI) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / ("dyngibbs-cli-" + name);
    fs::remove_all(dir);
    return dir;
}

std::vector<nlohmann::json> read_lines(const fs::path& p)
{
    std::ifstream in(p);
    std::vector<nlohmann::json> out;
    std::string line;
    while (std::getline(in, line))
        out.push_back(nlohmann::json::parse(line));
    return out;
}
}  // namespace

TEST_SUITE("cli")
{
TEST_CASE("run writes estimates and samples")
{
    auto out = scratch("run");
    REQUIRE(run_cli("run --instance " + kFix + "/ising_cycle6.json --updates " + kFix
                    + "/updates.jsonl --queries " + kFix + "/queries.json --schedule N=40,eps=0.05"
                    + " --delta given:0.3 --seed 3 --out " + out.string())
            == 0);
    auto est = read_lines(out / "estimates.jsonl");
    REQUIRE(est.size() == 16);  // 4 queries at steps 0..3
    CHECK(est[0]["step"] == 0);
    for (const auto& line : est)
    {
        if (line.contains("error"))
            continue;
        if (line["kind"] == "map")
            continue;
        double sum = 0;
        for (double v : line["values"])
            sum += v;
        CHECK(sum == doctest::Approx(1.0));
    }
    // Vertex 9 exists only after the second batch
    CHECK(est[3]["error"] == "UnknownVertex");
    CHECK(est[11].contains("values"));
    CHECK(est[15]["error"] == "UnknownVertex");
    auto samples = read_lines(out / "samples.jsonl");
    CHECK(samples.size() == 40);
    CHECK(samples[0]["sample"].size() == 6);
}

TEST_CASE("bench writes a report")
{
    auto out = scratch("bench");
    REQUIRE(run_cli("bench --instance " + kFix + "/hardcore_path4.json --updates " + kFix
                    + "/updates_hardcore.jsonl --schedule N=20,eps=0.05 --delta model:hardcore"
                    + " --out " + out.string())
            == 0);
    std::ifstream in(out / "bench.json");
    auto doc = nlohmann::json::parse(in);
    CHECK(doc["steps"].size() == 2);
    CHECK(doc.contains("speedup_ratio"));
}

TEST_CASE("exit codes")
{
    auto out = scratch("codes").string();
    const std::string inst = " --instance " + kFix + "/ising_cycle6.json --out " + out;
    CHECK(run_cli("run --bogus") == 1);
    CHECK(run_cli("frobnicate") == 1);
    CHECK(run_cli("run" + inst + " --schedule N=x") == 2);
    CHECK(run_cli("run" + inst + " --delta given:1.5") == 1);
    CHECK(run_cli("run --instance " + kFix + "/bad_instance.json --out " + out) == 2);
    CHECK(run_cli("run" + inst + " --updates " + kFix + "/bad_updates.jsonl") == 2);
    CHECK(run_cli("run --instance " + kFix + "/ising_hot.json --delta check --out " + out) == 3);
    CHECK(run_cli("run --instance " + kFix + "/ising_hot.json --delta model:ising --out " + out)
          == 3);
    // The fixture stream raises the influence at vertex 0 above its starting value
    CHECK(run_cli("run" + inst + " --updates " + kFix + "/updates.jsonl --delta check") == 3);
    CHECK(run_cli("run" + inst + " --updates " + kFix + "/updates.jsonl --delta given:0.3") == 0);
    CHECK(run_cli("verify --only 2") == 0);
}
}
