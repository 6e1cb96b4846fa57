#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrf.hpp"

namespace dyngibbs
{
using Configuration = std::map<VertexId, Spin>;

//! a * n^b * (ln n + 1)^c
struct PowerLogFn
{
    double a = 1;
    double b = 0;
    double c = 0;

    double operator()(std::size_t n) const;
};

//! Sample-count and accuracy schedules as functions of the vertex count.
struct ScheduleFns
{
    PowerLogFn count{100, 0, 0};
    PowerLogFn eps{0.01, 0, 0};

    //! max(1, ceil(count(n)))
    std::size_t samples(std::size_t n) const;
    double accuracy(std::size_t n) const { return eps(n); }
};

//! Parse "N=a[:b[:c]],eps=a[:b[:c]]"; throws parse_error
ScheduleFns parse_schedule(const std::string& text);

struct ScheduleReport
{
    double c_count = 0;     //!< max n |N(n+1) - N(n)| / N(n)
    double c_eps = 0;       //!< max n |eps(n+1) - eps(n)| / eps(n)
    double count_degree = 0;  //!< max ln N(n) / ln(n + 1)
    double eps_degree = 0;    //!< max ln(1 / eps(n)) / ln(n + 1)
    std::optional<std::size_t> first_failure;
    bool ok = true;
};

//! Check bounded differences over [n_lo, n_hi] against limit
ScheduleReport schedule_check(const ScheduleFns& fns, std::size_t n_lo, std::size_t n_hi,
                              double limit = 8.0);

//---------------------------------------------------------------------------//
// Sample differences
//---------------------------------------------------------------------------//

//! One coordinate that differs between the old and new sample sets.
struct DiffEntry
{
    std::uint32_t chain;
    VertexId vertex;
    std::optional<Spin> before;  //!< absent when unassigned
    std::optional<Spin> after;
};

struct SampleDiff
{
    std::size_t chains_before = 0;
    std::size_t chains_after = 0;
    std::vector<DiffEntry> entries;  //!< ascending (chain, vertex)

    //! Number of differing coordinates
    std::size_t size() const { return entries.size(); }
};

//! Compare two sample sequences coordinate by coordinate
SampleDiff sample_diff(const std::vector<Configuration>& before,
                       const std::vector<Configuration>& after);

//---------------------------------------------------------------------------//
// Queries and estimators
//---------------------------------------------------------------------------//

enum class QueryKind
{
    marginal,
    posterior,
    map,
};

struct Query
{
    QueryKind kind = QueryKind::marginal;
    std::vector<VertexId> a;
    std::vector<VertexId> b;
    std::vector<Spin> tau_b;  //!< aligned with b
};

//---------------------------------------------------------------------------//
/*!
 * Exact frequency counts of one query's variables over the sample set.
 *
 * Each sample is keyed by its spins on a followed by b, written in base
 * q + 1 with the first vertex most significant; digit q marks a vertex the
 * sample does not contain. Output vectors index the assignments of a in
 * base q with the first vertex most significant.
 */
class Estimator
{
  public:
    static constexpr std::size_t default_cap = 3;
    static constexpr std::size_t hard_cap = 8;

    Estimator(Query query, int q, std::size_t cap = default_cap);

    const Query& query() const { return query_; }
    std::size_t dimension() const { return dim_; }
    std::int64_t total() const { return static_cast<std::int64_t>(codes_.size()); }
    const std::map<std::uint64_t, std::int64_t>& counts() const { return counts_; }

    void rebuild(const std::vector<Configuration>& samples);
    //! Apply a diff; throws diff_inconsistent on a mismatched entry
    void apply(const SampleDiff& diff);
    //! Throws empty_posterior_condition when the posterior has no support
    std::vector<double> estimate() const;

  private:
    Query query_;
    int q_;
    std::size_t dim_ = 1;
    std::vector<VertexId> vars_;           // a then b
    std::map<VertexId, std::size_t> pos_;  // vertex -> digit position
    std::vector<std::uint64_t> weight_;    // place value per position
    std::uint64_t unassigned_ = 0;
    std::vector<std::uint64_t> codes_;     // per chain
    std::map<std::uint64_t, std::int64_t> counts_;

    std::uint64_t encode(const Configuration& s) const;
    Spin digit(std::uint64_t code, std::size_t pos) const;
    void move(std::uint64_t from, std::uint64_t to);
};

}  // namespace dyngibbs
