// Command-line driver: run, bench, verify.
#include <iostream>

#include <CLI11.hpp>

#include "dyngibbs/acceptance.hpp"
#include "dyngibbs/harness.hpp"

using namespace dyngibbs;

namespace
{
EdgeOrder parse_edge_order(const std::string& s)
{
    if (s == "auto")
        return EdgeOrder::automatic;
    if (s == "joint")
        return EdgeOrder::joint;
    if (s == "split")
        return EdgeOrder::split;
    fail(Errc::invalid_argument, "edge order must be auto, joint, or split");
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dynamic Gibbs sampling over a stream of MRF updates"};
    app.require_subcommand(1);

    RunConfig config;
    std::string delta = "check";
    std::string edge_order = "auto";
    auto add_common = [&](CLI::App* sub, bool need_instance) {
        auto* inst = sub->add_option("--instance", config.instance_path, "Instance JSON");
        if (need_instance)
            inst->required();
        sub->add_option("--updates", config.updates_path, "Update stream, one batch per line");
        sub->add_option("--schedule", config.schedule, "N=a[:b[:c]],eps=a[:b[:c]]")
            ->capture_default_str();
        sub->add_option("--delta", delta, "given:X, check, or model:ising|hardcore|coloring")
            ->capture_default_str();
        sub->add_option("--seed", config.seed, "Master seed")->capture_default_str();
        sub->add_option("--out", config.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--threads", config.threads, "Worker threads")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--edge-order", edge_order, "auto, joint, or split")
            ->capture_default_str();
    };

    auto* run = app.add_subcommand("run", "Maintain samples and estimates across updates");
    add_common(run, true);
    run->add_option("--queries", config.queries_path, "Query list JSON");

    auto* bench = app.add_subcommand("bench", "Time updates against full regeneration");
    add_common(bench, false);
    bench->add_option("--baseline-every", config.baseline_every, "Baseline every k batches")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    AcceptanceOptions accept;
    auto* verify = app.add_subcommand("verify", "Run the acceptance checks");
    verify->add_option("--seed", accept.seed, "Master seed")->capture_default_str();
    verify->add_option("--threads", accept.threads, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    verify->add_option("--out", accept.scratch_dir, "Scratch directory");
    verify->add_option("--only", accept.only, "Criterion ids to run")->check(CLI::Range(1, 9));

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::Success& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return 1;
    }

    try
    {
        if (*verify)
        {
            auto results = run_acceptance(accept, std::cout);
            for (const auto& r : results)
                if (!r.passed)
                    return 4;
            return 0;
        }
        config.delta = parse_delta(delta);
        config.edge_order = parse_edge_order(edge_order);
        if (*run)
        {
            cmd_run(config);
        }
        else
        {
            auto report = cmd_bench(config);
            std::cout << "n=" << report.n << " N=" << report.chains
                      << " T=" << report.chain_length << " ratio=" << report.ratio() << '\n';
        }
    }
    catch (const Error& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.code());
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
