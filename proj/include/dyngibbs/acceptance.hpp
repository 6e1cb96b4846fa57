#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace dyngibbs
{
struct CriterionResult
{
    int id = 0;
    std::string name;
    bool passed = false;
    bool warned = false;  //!< passed, but a soft bound was exceeded
    std::string detail;
    double seconds = 0;
};

struct AcceptanceOptions
{
    std::uint64_t seed = 20241018;
    unsigned threads = 1;
    std::string scratch_dir;  //!< for the determinism check; temp dir when empty
    std::vector<int> only;    //!< criterion ids to run; all when empty
};

//! Run the acceptance criteria, printing one line per criterion to out
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& out);

//! "[PASS] 3 name: detail (12.3 s)"
std::string format_result(const CriterionResult& r);

}  // namespace dyngibbs
