#include "ritmp/ltlk/universe.hpp"

#include <stdexcept>

namespace ritmp::ltlk
{

std::string_view sort_name( Sort s )
{
    switch ( s )
    {
    case Sort::Real:
        return "real";
    case Sort::Integer:
        return "int";
    case Sort::Boolean:
        return "bool";
    }
    return "?";
}

VarId VariableUniverse::add( std::string name, Sort sort, std::optional< Rational > lo, std::optional< Rational > hi )
{
    if ( name.empty() )
        throw std::invalid_argument( "variable name must not be empty" );
    if ( _index.contains( name ) )
        throw std::invalid_argument( "duplicate variable '" + name + "'" );
    if ( lo && hi && *lo > *hi )
        throw std::invalid_argument( "variable '" + name + "' has empty bounds" );
    if ( sort == Sort::Boolean )
    {
        lo.reset();
        hi.reset();
    }
    VarId id = _decls.size();
    _index.emplace( name, id );
    _decls.push_back( VarDecl{ std::move( name ), sort, std::move( lo ), std::move( hi ) } );
    return id;
}

std::optional< VarId > VariableUniverse::find( std::string_view name ) const
{
    if ( auto it = _index.find( std::string{ name } ); it != _index.end() )
        return it->second;
    return std::nullopt;
}

VarId VariableUniverse::at( std::string_view name ) const
{
    if ( auto id = find( name ) )
        return *id;
    throw std::out_of_range( "unknown variable '" + std::string{ name } + "'" );
}

bool VariableUniverse::finite_domain() const
{
    for ( const auto& d : _decls )
    {
        if ( d.sort == Sort::Real )
            return false;
        if ( d.sort == Sort::Integer && ( !d.lo || !d.hi ) )
            return false;
    }
    return true;
}

bool VariableUniverse::admits( VarId id, const Rational& value ) const
{
    const auto& d = _decls.at( id );
    if ( d.sort == Sort::Boolean )
        return value == 0 || value == 1;
    if ( d.sort == Sort::Integer && value.get_den() != 1 )
        return false;
    if ( d.lo && value < *d.lo )
        return false;
    if ( d.hi && value > *d.hi )
        return false;
    return true;
}

bool operator==( const VariableUniverse& a, const VariableUniverse& b )
{
    if ( a._decls.size() != b._decls.size() )
        return false;
    for ( std::size_t i = 0; i < a._decls.size(); ++i )
    {
        const auto& x = a._decls[ i ];
        const auto& y = b._decls[ i ];
        if ( x.name != y.name || x.sort != y.sort || x.lo != y.lo || x.hi != y.hi )
            return false;
    }
    return true;
}

} // namespace ritmp::ltlk
