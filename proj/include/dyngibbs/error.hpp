#pragma once

#include <stdexcept>
#include <string>

namespace dyngibbs
{
//! Failure categories raised by the library.
enum class Errc
{
    invalid_argument,
    infeasible_neighborhood,
    missing_boundary,
    domain_mismatch,
    degree_too_large,
    unknown_vertex,
    not_normalized,
    zero_probability_condition,
    neighbor_mismatch,
    rank_out_of_range,
    vertex_has_transitions,
    infeasible_instance,
    graph_mismatch,
    vertex_set_mismatch,
    shared_potential_mismatch,
    not_isolated,
    empty_posterior_condition,
    diff_inconsistent,
    too_large,
    space_mismatch,
    parse_error,
    asymmetric_edge,
    bad_arity,
    invalid_batch,
    regime_violation,
};

const char* to_string(Errc code);

//! Exception carrying an error category.
class Error : public std::runtime_error
{
  public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
    {
    }

    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what)
{
    throw Error(code, what);
}

}  // namespace dyngibbs
