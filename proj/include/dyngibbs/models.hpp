#pragma once

#include <span>
#include <string>
#include <vector>

#include "mrf.hpp"
#include "rng.hpp"

namespace dyngibbs
{
//! Plain undirected graph used by the model builders.
struct Graph
{
    std::vector<VertexId> vertices;
    std::vector<EdgeKey> edges;
};

Graph path_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph complete_graph(std::size_t n);
//! w-by-h periodic grid; vertex (x, y) has id y * w + x
Graph torus_graph(std::size_t w, std::size_t h);
//! Random simple graph with every degree at most max_degree
Graph random_bounded_degree_graph(std::size_t n, std::size_t max_degree,
                                  std::size_t target_edges, Rng& rng);
//! Random d-regular simple graph (n * d even); retries until simple
Graph random_regular_graph(std::size_t n, std::size_t d, Rng& rng);

// Ising: spin 0 is -1 and spin 1 is +1
VertexPotential ising_field(double h);
EdgePotential ising_coupling(double beta);
MrfInstance ising_model(const Graph& g, double beta, double field = 0.0);
MrfInstance ising_model(const Graph& g, double beta, std::span<const double> fields);

// Hardcore: spin 1 is occupied
VertexPotential hardcore_vertex(double lambda);
EdgePotential hardcore_edge();
MrfInstance hardcore_model(const Graph& g, double lambda);

// Proper q-coloring
VertexPotential uniform_vertex(int q);
EdgePotential coloring_edge(int q);
MrfInstance coloring_model(const Graph& g, int q);

enum class ModelKind
{
    ising,
    hardcore,
    coloring,
};

ModelKind parse_model_kind(const std::string& name);

//! Closed-form regime predicates with the gap they witness
bool ising_in_regime(double beta, std::size_t max_degree);
bool hardcore_in_regime(double lambda, std::size_t max_degree);
bool coloring_in_regime(int q, std::size_t max_degree);

//! Parameters of the mixing-length formula
struct MixingBound
{
    double delta = 0.5;
    double scale = 1.0;       //!< multiplies n / delta
    double log_factor = 1.0;  //!< multiplies n inside the log
};

//! Closed-form mixing bound for a model family; throws regime_violation
MixingBound model_regime_bound(ModelKind kind, const MrfInstance& inst);

//! True when the instance looks like a hardcore model
bool is_hardcore_like(const MrfInstance& inst);

}  // namespace dyngibbs
