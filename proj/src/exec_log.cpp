#include "dyngibbs/exec_log.hpp"

#include <algorithm>
#include <string>

namespace dyngibbs
{
//---------------------------------------------------------------------------//
// Treap plumbing, shared by the global (K = 0) and per-vertex (K = 1) trees
//---------------------------------------------------------------------------//
std::uint32_t ExecutionLog::priority(std::uint32_t x)
{
    std::uint32_t h = x * 0x9E3779B1u + 0x7F4A7C15u;
    h ^= h >> 16;
    h *= 0x85EBCA6Bu;
    h ^= h >> 13;
    h *= 0xC2B2AE35u;
    h ^= h >> 16;
    return h;
}

template<int K>
std::uint32_t& ExecutionLog::left(std::uint32_t x)
{
    if constexpr (K == 0)
        return nodes_[x].gl;
    else
        return nodes_[x].vl;
}
template<int K>
std::uint32_t& ExecutionLog::right(std::uint32_t x)
{
    if constexpr (K == 0)
        return nodes_[x].gr;
    else
        return nodes_[x].vr;
}
template<int K>
std::uint32_t& ExecutionLog::parent(std::uint32_t x)
{
    if constexpr (K == 0)
        return nodes_[x].gp;
    else
        return nodes_[x].vp;
}
template<int K>
std::uint32_t& ExecutionLog::size(std::uint32_t x)
{
    if constexpr (K == 0)
        return nodes_[x].gsize;
    else
        return nodes_[x].vsize;
}
template<int K>
std::uint32_t& ExecutionLog::root_of(std::uint32_t x)
{
    if constexpr (K == 0)
        return groot_;
    else
        return slots_[nodes_[x].slot].root;
}

template<int K>
void ExecutionLog::pull(std::uint32_t x)
{
    std::uint32_t l = left<K>(x), r = right<K>(x);
    size<K>(x) = 1 + (l == NIL ? 0 : size<K>(l)) + (r == NIL ? 0 : size<K>(r));
}

template<int K>
void ExecutionLog::rotate_up(std::uint32_t x)
{
    std::uint32_t p = parent<K>(x);
    std::uint32_t g = parent<K>(p);
    if (left<K>(p) == x)
    {
        std::uint32_t b = right<K>(x);
        left<K>(p) = b;
        if (b != NIL)
            parent<K>(b) = p;
        right<K>(x) = p;
    }
    else
    {
        std::uint32_t b = left<K>(x);
        right<K>(p) = b;
        if (b != NIL)
            parent<K>(b) = p;
        left<K>(x) = p;
    }
    parent<K>(p) = x;
    parent<K>(x) = g;
    if (g == NIL)
        root_of<K>(x) = x;
    else if (left<K>(g) == p)
        left<K>(g) = x;
    else
        right<K>(g) = x;
    pull<K>(p);
    pull<K>(x);
}

template<int K>
void ExecutionLog::sift_up(std::uint32_t x)
{
    const std::uint32_t px = priority(x);
    while (parent<K>(x) != NIL && priority(parent<K>(x)) < px)
        rotate_up<K>(x);
}

template<int K>
void ExecutionLog::detach(std::uint32_t x)
{
    while (left<K>(x) != NIL && right<K>(x) != NIL)
    {
        std::uint32_t l = left<K>(x), r = right<K>(x);
        rotate_up<K>(priority(l) > priority(r) ? l : r);
    }
    std::uint32_t c = left<K>(x) != NIL ? left<K>(x) : right<K>(x);
    std::uint32_t p = parent<K>(x);
    if (c != NIL)
        parent<K>(c) = p;
    if (p == NIL)
        root_of<K>(x) = c;
    else if (left<K>(p) == x)
        left<K>(p) = c;
    else
        right<K>(p) = c;
    for (std::uint32_t y = p; y != NIL; y = parent<K>(y))
        --size<K>(y);
    left<K>(x) = right<K>(x) = parent<K>(x) = NIL;
    size<K>(x) = 1;
}

// Max-heap Cartesian tree over an in-order sequence; returns the root
template<int K>
std::uint32_t ExecutionLog::build_cartesian(std::span<const std::uint32_t> seq)
{
    std::vector<std::uint32_t> stack;
    stack.reserve(64);
    for (std::uint32_t x : seq)
    {
        left<K>(x) = right<K>(x) = parent<K>(x) = NIL;
        std::uint32_t last = NIL;
        const std::uint32_t px = priority(x);
        while (!stack.empty() && priority(stack.back()) < px)
        {
            last = stack.back();
            stack.pop_back();
        }
        left<K>(x) = last;
        if (last != NIL)
            parent<K>(last) = x;
        if (!stack.empty())
        {
            right<K>(stack.back()) = x;
            parent<K>(x) = stack.back();
        }
        stack.push_back(x);
    }
    if (stack.empty())
        return NIL;
    std::uint32_t root = stack.front();

    // Post-order size computation without recursion
    std::vector<std::pair<std::uint32_t, bool>> work;
    work.emplace_back(root, false);
    while (!work.empty())
    {
        auto [x, expanded] = work.back();
        work.pop_back();
        if (expanded)
        {
            pull<K>(x);
            continue;
        }
        work.emplace_back(x, true);
        if (left<K>(x) != NIL)
            work.emplace_back(left<K>(x), false);
        if (right<K>(x) != NIL)
            work.emplace_back(right<K>(x), false);
    }
    return root;
}

//---------------------------------------------------------------------------//
// Node and slot bookkeeping
//---------------------------------------------------------------------------//
std::uint32_t ExecutionLog::alloc_node()
{
    std::uint32_t x;
    if (!free_nodes_.empty())
    {
        x = free_nodes_.back();
        free_nodes_.pop_back();
    }
    else
    {
        if (nodes_.size() >= NIL - 1)
            fail(Errc::too_large, "execution log node capacity exceeded");
        x = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
    }
    nodes_[x] = Node{NIL, NIL, NIL, 1, NIL, NIL, NIL, 1, 0, NIL, 0};
    return x;
}

void ExecutionLog::free_node(std::uint32_t x)
{
    nodes_[x].slot = NIL;
    free_nodes_.push_back(x);
}

void ExecutionLog::check_rank(Rank t, Rank hi) const
{
    if (t < 1 || t > hi)
        fail(Errc::rank_out_of_range,
             "rank " + std::to_string(t) + " outside [1, " + std::to_string(hi) + "]");
}

ExecutionLog::Slot ExecutionLog::slot_of(VertexId v) const
{
    auto it = slot_index_.find(v);
    if (it == slot_index_.end())
        fail(Errc::unknown_vertex, "vertex " + std::to_string(v) + " not in log");
    return it->second;
}

std::optional<ExecutionLog::Slot> ExecutionLog::find_slot(VertexId v) const
{
    auto it = slot_index_.find(v);
    if (it == slot_index_.end())
        return std::nullopt;
    return it->second;
}

void ExecutionLog::touch(Slot s)
{
    if (!journaling_)
        return;
    auto& rec = slots_[s];
    journal_.try_emplace(rec.id, Before{true, rec.final, size1(rec.root)});
}

void ExecutionLog::touch_absent(VertexId v)
{
    if (!journaling_)
        return;
    journal_.try_emplace(v, Before{false, 0, 0});
}

void ExecutionLog::refresh_final(Slot s)
{
    auto& rec = slots_[s];
    rec.final = rec.last == NIL ? rec.initial : nodes_[rec.last].spin;
}

std::uint32_t ExecutionLog::vertex_max(std::uint32_t root) const
{
    if (root == NIL)
        return NIL;
    while (nodes_[root].vr != NIL)
        root = nodes_[root].vr;
    return root;
}

std::uint32_t ExecutionLog::pred_below(std::uint32_t cur, std::uint64_t key) const
{
    std::uint32_t best = NIL;
    while (cur != NIL)
    {
        const Node& n = nodes_[cur];
        if (n.key < key)
        {
            best = cur;
            cur = n.vr;
        }
        else
        {
            cur = n.vl;
        }
    }
    return best;
}

std::uint32_t ExecutionLog::pred_at_most(std::uint32_t cur, std::uint64_t key) const
{
    std::uint32_t best = NIL;
    while (cur != NIL)
    {
        const Node& n = nodes_[cur];
        if (n.key <= key)
        {
            best = cur;
            cur = n.vr;
        }
        else
        {
            cur = n.vl;
        }
    }
    return best;
}

std::uint32_t ExecutionLog::succ_above(std::uint32_t cur, std::uint64_t key) const
{
    std::uint32_t best = NIL;
    while (cur != NIL)
    {
        const Node& n = nodes_[cur];
        if (n.key > key)
        {
            best = cur;
            cur = n.vl;
        }
        else
        {
            cur = n.vr;
        }
    }
    return best;
}

//---------------------------------------------------------------------------//
// Initial configuration
//---------------------------------------------------------------------------//
void ExecutionLog::add_vertex_initial(VertexId v, Spin c)
{
    if (slot_index_.count(v))
        fail(Errc::invalid_argument, "vertex " + std::to_string(v) + " already in log");
    touch_absent(v);
    Slot s;
    if (!free_slots_.empty())
    {
        s = free_slots_.back();
        free_slots_.pop_back();
    }
    else
    {
        s = static_cast<Slot>(slots_.size());
        slots_.emplace_back();
    }
    slots_[s] = SlotRec{v, c, c, NIL, NIL, true};
    slot_index_.emplace(v, s);
}

void ExecutionLog::remove_vertex(VertexId v)
{
    Slot s = slot_of(v);
    if (slots_[s].root != NIL)
        fail(Errc::vertex_has_transitions,
             "vertex " + std::to_string(v) + " still has transitions");
    touch(s);
    slots_[s].alive = false;
    slot_index_.erase(v);
    free_slots_.push_back(s);
}

void ExecutionLog::set_initial(VertexId v, Spin c)
{
    Slot s = slot_of(v);
    touch(s);
    slots_[s].initial = c;
    refresh_final(s);
}

Spin ExecutionLog::initial(VertexId v) const
{
    return slots_[slot_of(v)].initial;
}

std::vector<VertexId> ExecutionLog::vertex_ids() const
{
    std::vector<VertexId> ids;
    ids.reserve(slot_index_.size());
    for (auto& [id, s] : slot_index_)
        ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::map<VertexId, Spin> ExecutionLog::initial_state() const
{
    std::map<VertexId, Spin> out;
    for (auto& [id, s] : slot_index_)
        out.emplace(id, slots_[s].initial);
    return out;
}

std::map<VertexId, Spin> ExecutionLog::final_sample() const
{
    std::map<VertexId, Spin> out;
    for (auto& [id, s] : slot_index_)
        out.emplace(id, slots_[s].final);
    return out;
}

//---------------------------------------------------------------------------//
// Order labels
//---------------------------------------------------------------------------//
void ExecutionLog::relabel()
{
    std::uint64_t next = kGap;
    std::vector<std::uint32_t> stack;
    std::uint32_t cur = groot_;
    while (cur != NIL || !stack.empty())
    {
        while (cur != NIL)
        {
            stack.push_back(cur);
            cur = nodes_[cur].gl;
        }
        cur = stack.back();
        stack.pop_back();
        nodes_[cur].key = next;
        next += kGap;
        cur = nodes_[cur].gr;
    }
}

std::uint64_t ExecutionLog::key_for_insert(Rank t)
{
    const Rank n = this->length();
    for (int attempt = 0; attempt < 2; ++attempt)
    {
        std::uint64_t lo = t > 1 ? nodes_[step_at(t - 1)].key : 0;
        if (t <= n)
        {
            std::uint64_t hi = nodes_[step_at(t)].key;
            if (hi - lo >= 2)
                return lo + (hi - lo) / 2;
        }
        else if (lo <= ~std::uint64_t(0) - kGap)
        {
            return lo + kGap;
        }
        this->relabel();
    }
    fail(Errc::too_large, "order labels exhausted");
}

//---------------------------------------------------------------------------//
// Edits
//---------------------------------------------------------------------------//
void ExecutionLog::link_global_at(std::uint32_t x, Rank t)
{
    if (groot_ == NIL)
    {
        groot_ = x;
        return;
    }
    std::uint32_t cur = groot_;
    Rank pos = t;
    while (true)
    {
        Node& n = nodes_[cur];
        ++n.gsize;
        Rank ls = size0(n.gl);
        if (pos <= ls + 1)
        {
            if (n.gl == NIL)
            {
                n.gl = x;
                break;
            }
            cur = n.gl;
        }
        else
        {
            pos -= ls + 1;
            if (n.gr == NIL)
            {
                n.gr = x;
                break;
            }
            cur = n.gr;
        }
    }
    nodes_[x].gp = cur;
    sift_up<0>(x);
}

void ExecutionLog::link_vertex(std::uint32_t x)
{
    Slot s = nodes_[x].slot;
    auto& rec = slots_[s];
    const std::uint64_t key = nodes_[x].key;
    if (rec.root == NIL)
    {
        rec.root = x;
    }
    else
    {
        std::uint32_t cur = rec.root;
        while (true)
        {
            Node& n = nodes_[cur];
            ++n.vsize;
            if (key < n.key)
            {
                if (n.vl == NIL)
                {
                    n.vl = x;
                    break;
                }
                cur = n.vl;
            }
            else
            {
                if (n.vr == NIL)
                {
                    n.vr = x;
                    break;
                }
                cur = n.vr;
            }
        }
        nodes_[x].vp = cur;
        sift_up<1>(x);
    }
    if (rec.last == NIL || nodes_[rec.last].key < key)
        rec.last = x;
}

void ExecutionLog::insert(Rank t, VertexId v, Spin c)
{
    check_rank(t, this->length() + 1);
    Slot s = slot_of(v);
    touch(s);
    std::uint64_t key = key_for_insert(t);
    std::uint32_t x = alloc_node();
    nodes_[x].key = key;
    nodes_[x].slot = s;
    nodes_[x].spin = c;
    link_global_at(x, t);
    link_vertex(x);
    refresh_final(s);
}

void ExecutionLog::append(VertexId v, Spin c)
{
    this->insert(this->length() + 1, v, c);
}

void ExecutionLog::remove_node(std::uint32_t x)
{
    Slot s = nodes_[x].slot;
    touch(s);
    detach<0>(x);
    detach<1>(x);
    auto& rec = slots_[s];
    if (rec.last == x)
        rec.last = vertex_max(rec.root);
    refresh_final(s);
    free_node(x);
}

void ExecutionLog::remove(Rank t)
{
    check_rank(t, this->length());
    remove_node(step_at(t));
}

void ExecutionLog::change(Rank t, Spin c)
{
    check_rank(t, this->length());
    set_spin(step_at(t), c);
}

void ExecutionLog::set_spin(Step x, Spin c)
{
    Slot s = nodes_[x].slot;
    if (nodes_[x].spin == c)
        return;
    touch(s);
    nodes_[x].spin = c;
    if (slots_[s].last == x)
        slots_[s].final = c;
}

void ExecutionLog::truncate(Rank new_length)
{
    while (this->length() > new_length)
    {
        std::uint32_t x = groot_;
        while (nodes_[x].gr != NIL)
            x = nodes_[x].gr;
        remove_node(x);
    }
}

std::size_t ExecutionLog::remove_all(VertexId v)
{
    Slot s = slot_of(v);
    std::size_t count = 0;
    while (slots_[s].root != NIL)
    {
        remove_node(slots_[s].root);
        ++count;
    }
    return count;
}

void ExecutionLog::assign(std::span<const std::pair<VertexId, Spin>> initial,
                          std::span<const Transition> steps)
{
    if (steps.size() >= (std::size_t(1) << 31))
        fail(Errc::too_large, "execution log too long");
    if (journaling_)
    {
        for (auto& [id, s] : slot_index_)
            touch(s);
    }
    nodes_.clear();
    free_nodes_.clear();
    slots_.clear();
    free_slots_.clear();
    slot_index_.clear();
    groot_ = NIL;

    for (auto& [v, c] : initial)
    {
        if (slot_index_.count(v))
            fail(Errc::invalid_argument, "duplicate vertex in initial state");
        Slot s = static_cast<Slot>(slots_.size());
        slots_.push_back(SlotRec{v, c, c, NIL, NIL, true});
        slot_index_.emplace(v, s);
    }

    nodes_.resize(steps.size());
    std::vector<std::uint32_t> order(steps.size());
    std::vector<std::uint32_t> count(slots_.size() + 1, 0);
    for (std::size_t i = 0; i < steps.size(); ++i)
    {
        auto it = slot_index_.find(steps[i].vertex);
        if (it == slot_index_.end())
            fail(Errc::unknown_vertex,
                 "step vertex " + std::to_string(steps[i].vertex) + " not in log");
        auto x = static_cast<std::uint32_t>(i);
        nodes_[x] = Node{NIL, NIL, NIL, 1, NIL, NIL, NIL, 1,
                         (static_cast<std::uint64_t>(i) + 1) * kGap, it->second,
                         steps[i].spin};
        order[i] = x;
        ++count[it->second + 1];
    }
    groot_ = build_cartesian<0>(order);

    // Group steps by slot, keeping rank order, via counting sort
    for (std::size_t s = 1; s < count.size(); ++s)
        count[s] += count[s - 1];
    std::vector<std::uint32_t> grouped(steps.size());
    std::vector<std::uint32_t> fill(count.begin(), count.end() - 1);
    for (std::uint32_t x : order)
        grouped[fill[nodes_[x].slot]++] = x;
    for (Slot s = 0; s < slots_.size(); ++s)
    {
        std::span<const std::uint32_t> seq(grouped.data() + count[s],
                                           count[s + 1] - count[s]);
        slots_[s].root = build_cartesian<1>(seq);
        slots_[s].last = seq.empty() ? NIL : seq.back();
        refresh_final(s);
    }

    if (journaling_)
    {
        for (auto& [v, c] : initial)
            touch_absent(v);
    }
}

//---------------------------------------------------------------------------//
// Queries
//---------------------------------------------------------------------------//
ExecutionLog::Step ExecutionLog::step_at(Rank t) const
{
    std::uint32_t cur = groot_;
    while (cur != NIL)
    {
        const Node& n = nodes_[cur];
        Rank ls = size0(n.gl);
        if (t <= ls)
        {
            cur = n.gl;
        }
        else if (t == ls + 1)
        {
            return cur;
        }
        else
        {
            t -= ls + 1;
            cur = n.gr;
        }
    }
    fail(Errc::rank_out_of_range, "rank beyond log length");
}

Rank ExecutionLog::rank_of(Step x) const
{
    Rank r = size0(nodes_[x].gl) + 1;
    while (nodes_[x].gp != NIL)
    {
        std::uint32_t p = nodes_[x].gp;
        if (nodes_[p].gr == x)
            r += size0(nodes_[p].gl) + 1;
        x = p;
    }
    return r;
}

Transition ExecutionLog::at(Rank t) const
{
    check_rank(t, this->length());
    auto x = step_at(t);
    return {slots_[nodes_[x].slot].id, nodes_[x].spin};
}

Spin ExecutionLog::evaluate(Rank t, VertexId v) const
{
    Slot s = slot_of(v);
    const auto& rec = slots_[s];
    if (t >= this->length())
        return rec.final;
    if (t == 0 || rec.root == NIL)
        return rec.initial;
    std::uint32_t y = pred_at_most(rec.root, nodes_[step_at(t)].key);
    return y == NIL ? rec.initial : nodes_[y].spin;
}

std::optional<Rank> ExecutionLog::successor(Rank t, VertexId v) const
{
    Slot s = slot_of(v);
    if (t >= this->length())
        return std::nullopt;
    std::uint64_t key = t == 0 ? 0 : nodes_[step_at(t)].key;
    std::uint32_t y = succ_above(slots_[s].root, key);
    if (y == NIL)
        return std::nullopt;
    return rank_of(y);
}

Spin ExecutionLog::value_before(Step x, Slot s) const
{
    std::uint32_t y = pred_below(slots_[s].root, nodes_[x].key);
    return y == NIL ? slots_[s].initial : nodes_[y].spin;
}

ExecutionLog::Step ExecutionLog::next_occurrence(Step x, Slot s) const
{
    std::uint64_t key = x == NIL ? 0 : nodes_[x].key;
    return succ_above(slots_[s].root, key);
}

ExecutionLog::Step ExecutionLog::occurrence(Slot s, std::size_t k) const
{
    std::uint32_t cur = slots_[s].root;
    while (cur != NIL)
    {
        const Node& n = nodes_[cur];
        std::size_t ls = size1(n.vl);
        if (k < ls)
        {
            cur = n.vl;
        }
        else if (k == ls)
        {
            return cur;
        }
        else
        {
            k -= ls + 1;
            cur = n.vr;
        }
    }
    fail(Errc::rank_out_of_range, "occurrence index beyond count");
}

std::vector<Transition> ExecutionLog::transitions() const
{
    std::vector<Transition> out;
    out.reserve(this->length());
    std::vector<std::uint32_t> stack;
    std::uint32_t cur = groot_;
    while (cur != NIL || !stack.empty())
    {
        while (cur != NIL)
        {
            stack.push_back(cur);
            cur = nodes_[cur].gl;
        }
        cur = stack.back();
        stack.pop_back();
        out.push_back({slots_[nodes_[cur].slot].id, nodes_[cur].spin});
        cur = nodes_[cur].gr;
    }
    return out;
}

//---------------------------------------------------------------------------//
// Journal and audit
//---------------------------------------------------------------------------//
void ExecutionLog::set_journaling(bool on)
{
    journaling_ = on;
    journal_.clear();
}

std::vector<ExecutionLog::VertexChange> ExecutionLog::take_changes()
{
    std::vector<VertexChange> out;
    for (auto& [id, before] : journal_)
    {
        VertexChange ch;
        ch.vertex = id;
        if (before.alive)
            ch.final_before = before.final;
        ch.count_before = before.count;
        auto it = slot_index_.find(id);
        if (it != slot_index_.end())
        {
            ch.final_after = slots_[it->second].final;
            ch.count_after = size1(slots_[it->second].root);
        }
        if (ch.final_before != ch.final_after || ch.count_before != ch.count_after)
            out.push_back(ch);
    }
    journal_.clear();
    std::sort(out.begin(), out.end(),
              [](const VertexChange& a, const VertexChange& b) { return a.vertex < b.vertex; });
    return out;
}

std::size_t ExecutionLog::node_count() const
{
    return (nodes_.size() - free_nodes_.size()) + slot_index_.size();
}

bool ExecutionLog::check_invariants() const
{
    // Global tree: in-order labels strictly increase, sizes and parents agree
    std::vector<std::uint32_t> inorder;
    std::vector<std::uint32_t> stack;
    std::uint32_t cur = groot_;
    if (groot_ != NIL && nodes_[groot_].gp != NIL)
        return false;
    while (cur != NIL || !stack.empty())
    {
        while (cur != NIL)
        {
            stack.push_back(cur);
            cur = nodes_[cur].gl;
        }
        cur = stack.back();
        stack.pop_back();
        inorder.push_back(cur);
        cur = nodes_[cur].gr;
    }
    for (std::size_t i = 0; i < inorder.size(); ++i)
    {
        const Node& n = nodes_[inorder[i]];
        if (i > 0 && nodes_[inorder[i - 1]].key >= n.key)
            return false;
        if (n.gsize != 1 + size0(n.gl) + size0(n.gr))
            return false;
        if (n.gl != NIL && nodes_[n.gl].gp != inorder[i])
            return false;
        if (n.gr != NIL && nodes_[n.gr].gp != inorder[i])
            return false;
        if (n.gp != NIL && priority(n.gp) < priority(inorder[i]))
            return false;
        if (n.slot == NIL || !slots_[n.slot].alive)
            return false;
    }
    // Per-vertex trees
    std::size_t total = 0;
    for (auto& [id, s] : slot_index_)
    {
        const auto& rec = slots_[s];
        if (rec.id != id || !rec.alive)
            return false;
        std::vector<std::uint32_t> seq;
        cur = rec.root;
        if (cur != NIL && nodes_[cur].vp != NIL)
            return false;
        while (cur != NIL || !stack.empty())
        {
            while (cur != NIL)
            {
                stack.push_back(cur);
                cur = nodes_[cur].vl;
            }
            cur = stack.back();
            stack.pop_back();
            seq.push_back(cur);
            cur = nodes_[cur].vr;
        }
        for (std::size_t i = 0; i < seq.size(); ++i)
        {
            const Node& n = nodes_[seq[i]];
            if (n.slot != s)
                return false;
            if (i > 0 && nodes_[seq[i - 1]].key >= n.key)
                return false;
            if (n.vsize != 1 + size1(n.vl) + size1(n.vr))
                return false;
            if (n.vl != NIL && nodes_[n.vl].vp != seq[i])
                return false;
            if (n.vr != NIL && nodes_[n.vr].vp != seq[i])
                return false;
        }
        if ((seq.empty() ? NIL : seq.back()) != rec.last)
            return false;
        Spin expect = seq.empty() ? rec.initial : nodes_[seq.back()].spin;
        if (rec.final != expect)
            return false;
        total += seq.size();
    }
    return total == inorder.size();
}

}  // namespace dyngibbs
