#include "ritmp/ltlk/trace.hpp"

namespace ritmp::ltlk
{

BoundedTrace::BoundedTrace( std::size_t horizon, std::size_t variables )
    : K{ horizon }, steps( horizon + 1, std::vector< Rational >( variables ) )
{
}

std::string validate_trace( const BoundedTrace& trace, const VariableUniverse& u )
{
    if ( trace.steps.size() != trace.K + 1 )
        return "trace has " + std::to_string( trace.steps.size() ) + " steps, expected K+1 = " +
               std::to_string( trace.K + 1 );
    for ( std::size_t k = 0; k < trace.steps.size(); ++k )
    {
        if ( trace.steps[ k ].size() != u.size() )
            return "step " + std::to_string( k ) + " does not assign every variable";
        for ( VarId v = 0; v < u.size(); ++v )
            if ( !u.admits( v, trace.steps[ k ][ v ] ) )
                return "step " + std::to_string( k ) + ": value " + trace.steps[ k ][ v ].get_str() +
                       " not admitted for '" + u[ v ].name + "'";
    }
    return {};
}

} // namespace ritmp::ltlk
