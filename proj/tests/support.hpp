#pragma once

#include <optional>

#include "dyngibbs/error.hpp"

//! Error code thrown by f, or nothing when it returns normally
template<class F>
std::optional<dyngibbs::Errc> error_of(F&& f)
{
    try
    {
        f();
    }
    catch (const dyngibbs::Error& e)
    {
        return e.code();
    }
    return std::nullopt;
}
