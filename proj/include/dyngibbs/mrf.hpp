#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <variant>
#include <vector>

#include "error.hpp"

namespace dyngibbs
{
using VertexId = std::uint64_t;
using Spin = std::uint16_t;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

//! Number of spin states; spins are 0..q-1.
class SpinDomain
{
  public:
    explicit SpinDomain(int q);
    int q() const { return q_; }
    bool operator==(const SpinDomain&) const = default;

  private:
    int q_;
};

//! Per-vertex log-weights. -inf marks a forbidden spin.
class VertexPotential
{
  public:
    explicit VertexPotential(std::vector<double> weights);

    std::size_t size() const { return w_.size(); }
    double operator[](std::size_t c) const { return w_[c]; }
    std::span<const double> weights() const { return w_; }
    bool operator==(const VertexPotential&) const = default;

  private:
    std::vector<double> w_;
};

//! Symmetric q-by-q log-weight matrix, stored row-major.
class EdgePotential
{
  public:
    EdgePotential(int q, std::vector<double> weights);

    int q() const { return q_; }
    double operator()(std::size_t a, std::size_t b) const
    {
        return w_[a * q_ + b];
    }
    std::span<const double> weights() const { return w_; }
    bool operator==(const EdgePotential&) const = default;

  private:
    int q_;
    std::vector<double> w_;
};

//! Unordered vertex pair normalized so that lo < hi.
struct EdgeKey
{
    VertexId lo;
    VertexId hi;

    static EdgeKey of(VertexId a, VertexId b);
    auto operator<=>(const EdgeKey&) const = default;
};

class MrfInstance;

//---------------------------------------------------------------------------//
/*!
 * Read-only view of one vertex: its potential and incident edges.
 *
 * Neighbors are listed in ascending id order. The view borrows from the
 * instance it came from and must not outlive it.
 */
class LocalView
{
  public:
    struct Neighbor
    {
        VertexId id;
        const EdgePotential* potential;
    };

    LocalView(VertexId center, int q, const VertexPotential* phi,
              std::span<const Neighbor> nbrs)
        : center_(center), q_(q), phi_(phi), nbrs_(nbrs)
    {
    }

    VertexId center() const { return center_; }
    int q() const { return q_; }
    const VertexPotential& potential() const { return *phi_; }
    std::span<const Neighbor> neighbors() const { return nbrs_; }
    std::size_t degree() const { return nbrs_.size(); }

    //! Conditional marginal given neighbor spins listed in neighbor order
    void marginal(std::span<const Spin> nbr_spins, std::span<double> out) const;
    std::vector<double> marginal(std::span<const Spin> nbr_spins) const;

  private:
    VertexId center_;
    int q_;
    const VertexPotential* phi_;
    std::span<const Neighbor> nbrs_;
};

//---------------------------------------------------------------------------//
// Update records
//---------------------------------------------------------------------------//
struct AddVertex
{
    VertexId id;
    VertexPotential phi;
};
struct DeleteVertex
{
    VertexId id;
};
struct AddEdge
{
    EdgeKey edge;
    EdgePotential phi;
};
struct DeleteEdge
{
    EdgeKey edge;
};
struct SetVertexPotential
{
    VertexId id;
    VertexPotential phi;
};
struct SetEdgePotential
{
    EdgeKey edge;
    EdgePotential phi;
};

using UpdateRecord = std::variant<AddVertex, DeleteVertex, AddEdge, DeleteEdge,
                                  SetVertexPotential, SetEdgePotential>;

//! Ordered list of update records applied as one step.
struct UpdateBatch
{
    std::vector<UpdateRecord> records;
    bool empty() const { return records.empty(); }
};

//---------------------------------------------------------------------------//
/*!
 * Immutable pairwise Markov random field.
 *
 * Copies are cheap: the topology and potentials are shared. Vertices are
 * indexed densely in ascending id order.
 */
class MrfInstance
{
  public:
    using Neighbor = LocalView::Neighbor;
    using VertexMap = std::map<VertexId, std::shared_ptr<const VertexPotential>>;
    using EdgeMap = std::map<EdgeKey, std::shared_ptr<const EdgePotential>>;

    //! Empty instance over q spins
    explicit MrfInstance(int q = 2);

    //! Validate and assemble from potentials
    static MrfInstance build(int q, VertexMap vertices, EdgeMap edges);
    static MrfInstance
    build(int q, std::vector<std::pair<VertexId, VertexPotential>> vertices,
          std::vector<std::pair<EdgeKey, EdgePotential>> edges);

    int q() const { return d_->q; }
    SpinDomain domain() const { return SpinDomain(d_->q); }
    std::size_t num_vertices() const { return d_->ids.size(); }
    std::size_t num_edges() const { return d_->edges.size(); }
    std::size_t max_degree() const { return d_->max_degree; }

    //! Vertex ids in ascending order
    std::span<const VertexId> vertices() const { return d_->ids; }
    const VertexMap& vertex_map() const { return d_->vertices; }
    const EdgeMap& edges() const { return d_->edges; }

    bool has_vertex(VertexId v) const { return d_->index.count(v) != 0; }
    bool has_edge(EdgeKey e) const { return d_->edges.count(e) != 0; }

    //! Dense index of a vertex; throws unknown_vertex
    std::uint32_t index_of(VertexId v) const;
    VertexId id_at(std::uint32_t i) const { return d_->ids[i]; }

    const VertexPotential& vertex_potential(VertexId v) const;
    const VertexPotential& vertex_potential_at(std::uint32_t i) const
    {
        return *d_->vpot[i];
    }
    //! Edge potential or nullptr when absent
    const EdgePotential* edge_potential(EdgeKey e) const;

    std::span<const Neighbor> neighbors_at(std::uint32_t i) const
    {
        return d_->adj[i];
    }
    std::span<const Neighbor> neighbors(VertexId v) const
    {
        return d_->adj[this->index_of(v)];
    }
    std::size_t degree(VertexId v) const { return this->neighbors(v).size(); }
    //! Dense indices of the neighbors, aligned with neighbors_at(i)
    std::span<const std::uint32_t> neighbor_indices_at(std::uint32_t i) const
    {
        return d_->adj_index[i];
    }

    LocalView local_at(std::uint32_t i) const
    {
        return LocalView(d_->ids[i], d_->q, d_->vpot[i].get(), d_->adj[i]);
    }
    //! Local view; throws unknown_vertex
    LocalView local(VertexId v) const { return this->local_at(this->index_of(v)); }

  private:
    struct Data
    {
        int q = 2;
        VertexMap vertices;
        EdgeMap edges;
        std::vector<VertexId> ids;
        std::unordered_map<VertexId, std::uint32_t> index;
        std::vector<std::shared_ptr<const VertexPotential>> vpot;
        std::vector<std::vector<Neighbor>> adj;
        std::vector<std::vector<std::uint32_t>> adj_index;
        std::size_t max_degree = 0;
    };
    std::shared_ptr<const Data> d_;
};

//---------------------------------------------------------------------------//
// Free functions
//---------------------------------------------------------------------------//

//! Conditional law of v's spin given every neighbor's spin
std::vector<double> conditional_marginal(const MrfInstance& inst, VertexId v,
                                         const std::map<VertexId, Spin>& boundary);

//! Normalize log-weights in place into probabilities
void normalize_log_weights(std::span<double> w);

//! L1 distance of two log-weight vectors; +inf on finiteness mismatch
double l1_log_distance(std::span<const double> a, std::span<const double> b);

struct InstanceDiff
{
    double d_graph = 0;
    double d_ham = 0;
    double d_total = 0;
};

InstanceDiff instance_diff(const MrfInstance& a, const MrfInstance& b);

struct FeasibilityViolation
{
    VertexId vertex;
    std::map<VertexId, Spin> boundary;
};

//! First vertex/boundary pair with no positive-weight spin, if any
std::optional<FeasibilityViolation>
validate_feasibility(const MrfInstance& inst, double max_enumeration = 1e7);

struct DobrushinReport
{
    std::vector<double> row_sums;  //!< aligned with inst.vertices()
    double delta = 1;
    bool satisfied = true;
};

//! Exact influence-matrix row sums by boundary enumeration
DobrushinReport dobrushin_check(const MrfInstance& inst,
                                std::size_t degree_cap = 8);

//! Apply update records in order; throws invalid_batch on bad records
MrfInstance apply_batch(const MrfInstance& inst, const UpdateBatch& batch);

//! Total variation distance of two probability vectors
double tv_distance(std::span<const double> p, std::span<const double> q);

//! Inverse-CDF draw over ascending spin index using one uniform
Spin sample_categorical(std::span<const double> p, double u);

}  // namespace dyngibbs
