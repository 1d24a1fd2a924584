#pragma once

#include "ritmp/ltlk/universe.hpp"
#include "ritmp/rational.hpp"

#include <vector>

namespace ritmp::ltlk
{

/// K-bounded prefix: K+1 full valuations, booleans stored as 0/1.
struct BoundedTrace
{
    std::size_t K = 0;
    std::vector< std::vector< Rational > > steps;

    BoundedTrace() = default;
    BoundedTrace( std::size_t horizon, std::size_t variables );

    [[nodiscard]] const Rational& value( VarId var, std::size_t k ) const { return steps.at( k ).at( var ); }
    Rational& value( VarId var, std::size_t k ) { return steps.at( k ).at( var ); }
    [[nodiscard]] bool truth( VarId var, std::size_t k ) const { return value( var, k ) != 0; }

    friend bool operator==( const BoundedTrace&, const BoundedTrace& ) = default;
};

/// Empty string when `trace` is well formed for `u`, otherwise the first problem found.
std::string validate_trace( const BoundedTrace& trace, const VariableUniverse& u );

} // namespace ritmp::ltlk
