#include "dyngibbs/inference.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace dyngibbs
{
double PowerLogFn::operator()(std::size_t n) const
{
    double x = static_cast<double>(n);
    return a * std::pow(x, b) * std::pow(std::log(x) + 1.0, c);
}

std::size_t ScheduleFns::samples(std::size_t n) const
{
    double v = std::ceil(count(std::max<std::size_t>(n, 1)) - 1e-9);
    if (!(v < 1e9))
        fail(Errc::too_large, "sample count schedule exceeds 1e9");
    return v < 1 ? 1 : static_cast<std::size_t>(v);
}

namespace
{
PowerLogFn parse_fn(const std::string& key, const std::string& text)
{
    PowerLogFn f;
    double* slots[] = {&f.a, &f.b, &f.c};
    std::stringstream ss(text);
    std::string part;
    int i = 0;
    while (std::getline(ss, part, ':'))
    {
        if (i == 3)
            fail(Errc::parse_error, key + ": at most three coefficients");
        std::size_t used = 0;
        try
        {
            *slots[i] = std::stod(part, &used);
        }
        catch (const std::exception&)
        {
            used = 0;
        }
        if (used == 0 || used != part.size())
            fail(Errc::parse_error, key + ": bad number '" + part + "'");
        ++i;
    }
    if (i == 0 || !(f.a > 0))
        fail(Errc::parse_error, key + ": leading coefficient must be positive");
    return f;
}
}  // namespace

ScheduleFns parse_schedule(const std::string& text)
{
    ScheduleFns fns;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            fail(Errc::parse_error, "schedule item '" + item + "' lacks '='");
        std::string key = item.substr(0, eq);
        std::string val = item.substr(eq + 1);
        if (key == "N")
            fns.count = parse_fn(key, val);
        else if (key == "eps")
            fns.eps = parse_fn(key, val);
        else
            fail(Errc::parse_error, "unknown schedule key '" + key + "'");
    }
    return fns;
}

ScheduleReport schedule_check(const ScheduleFns& fns, std::size_t n_lo, std::size_t n_hi,
                              double limit)
{
    ScheduleReport r;
    auto flag = [&](std::size_t n) {
        if (r.ok)
            r.first_failure = n;
        r.ok = false;
    };
    n_lo = std::max<std::size_t>(n_lo, 1);
    for (std::size_t n = n_lo; n <= n_hi; ++n)
    {
        double nn = static_cast<double>(n);
        double cur = static_cast<double>(fns.samples(n));
        double nxt = static_cast<double>(fns.samples(n + 1));
        double e0 = fns.eps(n);
        double e1 = fns.eps(n + 1);
        if (!(e0 > 0 && e0 < 1))
        {
            flag(n);
            continue;
        }
        double c1 = nn * std::abs(nxt - cur) / cur;
        double c2 = nn * std::abs(e1 - e0) / e0;
        r.c_count = std::max(r.c_count, c1);
        r.c_eps = std::max(r.c_eps, c2);
        double ln = std::log(nn + 1);
        r.count_degree = std::max(r.count_degree, std::log(cur) / ln);
        r.eps_degree = std::max(r.eps_degree, std::log(1 / e0) / ln);
        if (c1 > limit || c2 > limit)
            flag(n);
    }
    return r;
}

//---------------------------------------------------------------------------//
SampleDiff sample_diff(const std::vector<Configuration>& before,
                       const std::vector<Configuration>& after)
{
    SampleDiff d;
    d.chains_before = before.size();
    d.chains_after = after.size();
    static const Configuration empty;
    const std::size_t m = std::max(before.size(), after.size());
    for (std::size_t i = 0; i < m; ++i)
    {
        const auto& x = i < before.size() ? before[i] : empty;
        const auto& y = i < after.size() ? after[i] : empty;
        auto ix = x.begin();
        auto iy = y.begin();
        auto chain = static_cast<std::uint32_t>(i);
        while (ix != x.end() || iy != y.end())
        {
            if (iy == y.end() || (ix != x.end() && ix->first < iy->first))
            {
                d.entries.push_back({chain, ix->first, ix->second, std::nullopt});
                ++ix;
            }
            else if (ix == x.end() || iy->first < ix->first)
            {
                d.entries.push_back({chain, iy->first, std::nullopt, iy->second});
                ++iy;
            }
            else
            {
                if (ix->second != iy->second)
                    d.entries.push_back({chain, ix->first, ix->second, iy->second});
                ++ix;
                ++iy;
            }
        }
    }
    return d;
}

//---------------------------------------------------------------------------//
Estimator::Estimator(Query query, int q, std::size_t cap)
    : query_(std::move(query)), q_(q)
{
    cap = std::min(cap, hard_cap);
    if (query_.a.empty())
        fail(Errc::invalid_argument, "query needs at least one target vertex");
    if (query_.a.size() > cap || query_.b.size() > cap)
        fail(Errc::invalid_argument, "query vertex set exceeds the cap");
    if (query_.kind == QueryKind::marginal && !query_.b.empty())
        fail(Errc::invalid_argument, "marginal queries take no condition");
    if (query_.b.size() != query_.tau_b.size())
        fail(Errc::invalid_argument, "condition values must align with the condition set");
    for (Spin s : query_.tau_b)
        if (s >= q)
            fail(Errc::invalid_argument, "condition spin out of range");
    vars_ = query_.a;
    vars_.insert(vars_.end(), query_.b.begin(), query_.b.end());
    for (std::size_t i = 0; i < vars_.size(); ++i)
    {
        if (!pos_.emplace(vars_[i], i).second)
            fail(Errc::invalid_argument, "query vertices must be distinct");
    }
    weight_.assign(vars_.size(), 1);
    for (std::size_t i = vars_.size(); i-- > 1;)
        weight_[i - 1] = weight_[i] * static_cast<std::uint64_t>(q + 1);
    for (std::size_t i = 0; i < vars_.size(); ++i)
        unassigned_ += weight_[i] * static_cast<std::uint64_t>(q);
    for (std::size_t i = 0; i < query_.a.size(); ++i)
        dim_ *= static_cast<std::size_t>(q);
}

std::uint64_t Estimator::encode(const Configuration& s) const
{
    std::uint64_t code = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i)
    {
        auto it = s.find(vars_[i]);
        code += weight_[i] * (it == s.end() ? q_ : it->second);
    }
    return code;
}

Spin Estimator::digit(std::uint64_t code, std::size_t pos) const
{
    return static_cast<Spin>((code / weight_[pos]) % static_cast<std::uint64_t>(q_ + 1));
}

void Estimator::move(std::uint64_t from, std::uint64_t to)
{
    if (from == to)
        return;
    auto it = counts_.find(from);
    if (--it->second == 0)
        counts_.erase(it);
    ++counts_[to];
}

void Estimator::rebuild(const std::vector<Configuration>& samples)
{
    codes_.clear();
    counts_.clear();
    for (const auto& s : samples)
    {
        codes_.push_back(this->encode(s));
        ++counts_[codes_.back()];
    }
}

void Estimator::apply(const SampleDiff& diff)
{
    if (diff.chains_before != codes_.size())
        fail(Errc::diff_inconsistent, "diff starts from a different sample count");
    if (diff.chains_after > codes_.size())
    {
        counts_[unassigned_] += static_cast<std::int64_t>(diff.chains_after - codes_.size());
        codes_.resize(diff.chains_after, unassigned_);
    }
    for (const auto& e : diff.entries)
    {
        if (e.chain >= codes_.size())
            fail(Errc::diff_inconsistent, "diff entry names an unknown chain");
        auto p = pos_.find(e.vertex);
        if (p == pos_.end())
            continue;
        std::uint64_t& code = codes_[e.chain];
        Spin cur = this->digit(code, p->second);
        Spin was = e.before ? *e.before : static_cast<Spin>(q_);
        if (cur != was)
            fail(Errc::diff_inconsistent, "diff entry disagrees with the maintained sample");
        Spin now = e.after ? *e.after : static_cast<Spin>(q_);
        if (now > q_)
            fail(Errc::diff_inconsistent, "diff spin out of range");
        std::uint64_t next = code - weight_[p->second] * cur + weight_[p->second] * now;
        this->move(code, next);
        code = next;
    }
    while (codes_.size() > diff.chains_after)
    {
        if (codes_.back() != unassigned_)
            fail(Errc::diff_inconsistent, "removed chain still holds query values");
        auto it = counts_.find(unassigned_);
        if (--it->second == 0)
            counts_.erase(it);
        codes_.pop_back();
    }
}

std::vector<double> Estimator::estimate() const
{
    if (codes_.empty())
        fail(Errc::invalid_argument, "estimate needs at least one sample");
    const std::size_t na = query_.a.size();
    std::uint64_t b_part = 0;
    for (std::size_t j = 0; j < query_.b.size(); ++j)
        b_part += weight_[na + j] * query_.tau_b[j];
    const std::uint64_t a_span = na < vars_.size() ? weight_[na - 1] : 1;

    // Split a code into (a-index in base q, b-part), or nothing if a is unassigned
    auto split = [&](std::uint64_t code) -> std::optional<std::pair<std::size_t, std::uint64_t>> {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < na; ++i)
        {
            Spin s = this->digit(code, i);
            if (s == q_)
                return std::nullopt;
            idx = idx * static_cast<std::size_t>(q_) + s;
        }
        return std::make_pair(idx, code % a_span);
    };

    std::vector<double> out(dim_, 0.0);
    const double total = static_cast<double>(codes_.size());
    switch (query_.kind)
    {
        case QueryKind::marginal:
            for (auto& [code, n] : counts_)
                if (auto s = split(code))
                    out[s->first] += static_cast<double>(n) / total;
            break;
        case QueryKind::posterior:
        {
            std::int64_t denom = 0;
            std::vector<std::int64_t> num(dim_, 0);
            for (auto& [code, n] : counts_)
            {
                auto s = split(code);
                if (s && s->second == b_part)
                {
                    num[s->first] += n;
                    denom += n;
                }
            }
            if (denom == 0)
                fail(Errc::empty_posterior_condition, "condition never observed");
            for (std::size_t k = 0; k < dim_; ++k)
                out[k] = static_cast<double>(num[k]) / static_cast<double>(denom);
            break;
        }
        case QueryKind::map:
        {
            std::vector<std::int64_t> best(dim_, 0);
            for (auto& [code, n] : counts_)
            {
                auto s = split(code);
                if (!s)
                    continue;
                bool assigned = true;
                for (std::size_t j = 0; j < query_.b.size(); ++j)
                    assigned = assigned && this->digit(code, na + j) != q_;
                if (assigned)
                    best[s->first] = std::max(best[s->first], n);
            }
            for (std::size_t k = 0; k < dim_; ++k)
                out[k] = static_cast<double>(best[k]) / total;
            break;
        }
    }
    return out;
}

}  // namespace dyngibbs
