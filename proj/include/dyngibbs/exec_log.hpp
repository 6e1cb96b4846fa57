#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "mrf.hpp"

namespace dyngibbs
{
using Rank = std::uint64_t;

struct Transition
{
    VertexId vertex;
    Spin spin;
    bool operator==(const Transition&) const = default;
};

//---------------------------------------------------------------------------//
/*!
 * Initial configuration plus the ordered transitions of one Gibbs chain.
 *
 * Transitions live in two kinds of treaps sharing the same nodes: an
 * order-statistic treap over all steps (rank <-> step) and one treap per
 * vertex holding that vertex's steps. Every step also carries a 64-bit
 * order label, monotone in rank, so per-vertex searches compare labels
 * directly instead of computing ranks. Labels are midpoints of their
 * neighbors; when a gap is exhausted all labels are reassigned.
 *
 * Ranks are 1-based. Rank 0 denotes the initial configuration.
 *
 * The cursor interface (Step handles) is the fast path for replay loops.
 * Handles stay valid until the next insert, remove, truncate, or assign.
 */
class ExecutionLog
{
  public:
    using Step = std::uint32_t;
    using Slot = std::uint32_t;
    static constexpr std::uint32_t npos = 0xFFFFFFFFu;

    //!@{
    //! \name Initial configuration
    void add_vertex_initial(VertexId v, Spin c);
    void remove_vertex(VertexId v);
    void set_initial(VertexId v, Spin c);
    Spin initial(VertexId v) const;
    bool has_vertex(VertexId v) const { return slot_index_.count(v) != 0; }
    std::size_t num_vertices() const { return slot_index_.size(); }
    std::vector<VertexId> vertex_ids() const;
    std::map<VertexId, Spin> initial_state() const;
    //!@}

    //!@{
    //! \name Rank-indexed edits and queries
    Rank length() const { return size0(groot_); }
    void insert(Rank t, VertexId v, Spin c);
    void append(VertexId v, Spin c);
    void remove(Rank t);
    void change(Rank t, Spin c);
    Transition at(Rank t) const;
    //! Spin of v after the first t steps; t beyond the end clamps
    Spin evaluate(Rank t, VertexId v) const;
    //! Smallest rank above t whose step updates v
    std::optional<Rank> successor(Rank t, VertexId v) const;
    //! Drop every step after rank new_length
    void truncate(Rank new_length);
    //! Remove every step of v; returns how many were removed
    std::size_t remove_all(VertexId v);
    //! Replace contents in O(T + |V|)
    void assign(std::span<const std::pair<VertexId, Spin>> initial,
                std::span<const Transition> steps);
    std::vector<Transition> transitions() const;
    //!@}

    //!@{
    //! \name Final configuration
    Spin final_spin(VertexId v) const { return slots_[slot_of(v)].final; }
    std::map<VertexId, Spin> final_sample() const;
    std::size_t occurrences(VertexId v) const
    {
        return size1(slots_[slot_of(v)].root);
    }
    //!@}

    //!@{
    //! \name Cursor interface
    Slot slot_of(VertexId v) const;
    std::optional<Slot> find_slot(VertexId v) const;
    std::size_t occurrences_in(Slot s) const { return size1(slots_[s].root); }
    Spin final_in(Slot s) const { return slots_[s].final; }

    Step step_at(Rank t) const;
    Rank rank_of(Step x) const;
    VertexId vertex_of(Step x) const { return slots_[nodes_[x].slot].id; }
    Slot slot_of_step(Step x) const { return nodes_[x].slot; }
    Spin spin_of(Step x) const { return nodes_[x].spin; }
    std::uint64_t order_key(Step x) const { return nodes_[x].key; }
    void set_spin(Step x, Spin c);
    //! Spin of slot s just before step x
    Spin value_before(Step x, Slot s) const;
    //! First step of slot s after x (after the start when x is npos)
    Step next_occurrence(Step x, Slot s) const;
    //! k-th step (0-based) of slot s
    Step occurrence(Slot s, std::size_t k) const;
    //!@}

    //!@{
    //! \name Change journal
    struct VertexChange
    {
        VertexId vertex;
        std::optional<Spin> final_before;
        std::optional<Spin> final_after;
        std::size_t count_before = 0;
        std::size_t count_after = 0;
    };
    void set_journaling(bool on);
    //! Vertices whose final spin, presence, or step count changed
    std::vector<VertexChange> take_changes();
    //!@}

    //! Live transition nodes plus vertex records
    std::size_t node_count() const;
    //! Full structural audit; returns false on any broken invariant
    bool check_invariants() const;

  private:
    static constexpr std::uint32_t NIL = npos;
    static constexpr std::uint64_t kGap = std::uint64_t(1) << 32;

    struct Node
    {
        std::uint32_t gl, gr, gp, gsize;  // global treap
        std::uint32_t vl, vr, vp, vsize;  // per-vertex treap
        std::uint64_t key;
        std::uint32_t slot;
        Spin spin;
    };

    struct SlotRec
    {
        VertexId id = 0;
        Spin initial = 0;
        Spin final = 0;
        std::uint32_t root = NIL;
        std::uint32_t last = NIL;
        bool alive = false;
    };

    struct Before
    {
        bool alive;
        Spin final;
        std::size_t count;
    };

    std::vector<Node> nodes_;
    std::vector<std::uint32_t> free_nodes_;
    std::vector<SlotRec> slots_;
    std::vector<std::uint32_t> free_slots_;
    std::unordered_map<VertexId, Slot> slot_index_;
    std::uint32_t groot_ = NIL;
    bool journaling_ = false;
    std::unordered_map<VertexId, Before> journal_;

    static std::uint32_t priority(std::uint32_t x);

    std::uint32_t size0(std::uint32_t x) const { return x == NIL ? 0 : nodes_[x].gsize; }
    std::uint32_t size1(std::uint32_t x) const { return x == NIL ? 0 : nodes_[x].vsize; }

    template<int K> std::uint32_t& left(std::uint32_t x);
    template<int K> std::uint32_t& right(std::uint32_t x);
    template<int K> std::uint32_t& parent(std::uint32_t x);
    template<int K> std::uint32_t& size(std::uint32_t x);
    template<int K> std::uint32_t& root_of(std::uint32_t x);
    template<int K> void pull(std::uint32_t x);
    template<int K> void rotate_up(std::uint32_t x);
    template<int K> void sift_up(std::uint32_t x);
    template<int K> void detach(std::uint32_t x);
    template<int K> std::uint32_t build_cartesian(std::span<const std::uint32_t> seq);

    std::uint32_t alloc_node();
    void free_node(std::uint32_t x);
    void check_rank(Rank t, Rank hi) const;
    void touch(Slot s);
    void touch_absent(VertexId v);
    void refresh_final(Slot s);
    std::uint64_t key_for_insert(Rank t);
    void relabel();
    void link_global_at(std::uint32_t x, Rank t);
    void link_vertex(std::uint32_t x);
    void remove_node(std::uint32_t x);
    std::uint32_t vertex_max(std::uint32_t root) const;
    std::uint32_t pred_below(std::uint32_t root, std::uint64_t key) const;
    std::uint32_t pred_at_most(std::uint32_t root, std::uint64_t key) const;
    std::uint32_t succ_above(std::uint32_t root, std::uint64_t key) const;
};

}  // namespace dyngibbs
