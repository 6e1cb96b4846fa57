// Acceptance driver: one line per criterion, nonzero exit on any failure.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "dyngibbs/acceptance.hpp"

int main(int argc, char** argv)
{
    dyngibbs::AcceptanceOptions options;
    std::string report;
    for (int i = 1; i < argc; ++i)
    {
        std::string arg = argv[i];
        if (arg == "--threads" && i + 1 < argc)
            options.threads = static_cast<unsigned>(std::stoul(argv[++i]));
        else if (arg == "--report" && i + 1 < argc)
            report = argv[++i];
        else if (arg == "--seed" && i + 1 < argc)
            options.seed = std::stoull(argv[++i]);
        else
            options.only.push_back(std::stoi(arg));
    }
    auto results = dyngibbs::run_acceptance(options, std::cout);
    int failed = 0;
    for (const auto& r : results)
        failed += !r.passed;
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
    if (!report.empty())
    {
        std::ofstream out(report);
        for (const auto& r : results)
            out << dyngibbs::format_result(r) << '\n';
    }
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
