#include "ritmp/taskspec/warehouse.hpp"

#include <set>
#include <stdexcept>

namespace ritmp::taskspec
{

using namespace ritmp::ltlk;

std::size_t Warehouse::location_index( const std::string& name ) const
{
    for ( std::size_t i = 0; i < locations.size(); ++i )
        if ( locations[ i ].name == name )
            return i;
    throw std::invalid_argument( "unknown location '" + name + "'" );
}

std::size_t Warehouse::object_index( const std::string& name ) const
{
    for ( std::size_t i = 0; i < objects.size(); ++i )
        if ( objects[ i ] == name )
            return i;
    throw std::invalid_argument( "unknown object '" + name + "'" );
}

namespace
{

Formula same( VarId v, Sort s )
{
    if ( s == Sort::Boolean )
    {
        Formula b = bool_var( v );
        return conj( { implies( b, next( b ) ), implies( next( b ), b ) } );
    }
    return linear( { { 1, TemporalTerm{ v, 1 } }, { -1, TemporalTerm{ v, 0 } } }, Relation::Eq, 0 );
}

Formula keep_pose( const WarehouseVars& v )
{
    return conj( { same( v.px, Sort::Real ), same( v.py, Sort::Real ), same( v.theta, Sort::Real ) } );
}

Formula keep_objects( const Warehouse& w, std::optional< std::size_t > except, bool gripper )
{
    std::vector< Formula > parts;
    for ( std::size_t o = 0; o < w.objects.size(); ++o )
        if ( o != except )
            parts.push_back( same( w.vars.object_loc[ o ], Sort::Integer ) );
    if ( gripper )
        parts.push_back( same( w.vars.holding, Sort::Boolean ) );
    return conj( std::move( parts ) );
}

Rational idx( std::size_t i ) { return Rational{ static_cast< unsigned long >( i ) }; }

} // namespace

Formula robot_at( const Warehouse& w, std::size_t loc, unsigned nexts )
{
    const auto& l = w.locations.at( loc );
    return conj( { equals( w.task.universe, w.vars.px, l.x, nexts ), equals( w.task.universe, w.vars.py, l.y, nexts ) } );
}

Warehouse warehouse_actions( const std::vector< NamedLocation >& locations, const std::vector< std::string >& objects )
{
    if ( locations.empty() )
        throw std::invalid_argument( "warehouse needs at least one location" );
    std::set< std::string > seen;
    for ( const auto& l : locations )
        if ( !seen.insert( l.name ).second )
            throw std::invalid_argument( "duplicate location '" + l.name + "'" );
    for ( std::size_t i = 0; i < locations.size(); ++i )
        for ( std::size_t j = i + 1; j < locations.size(); ++j )
            if ( locations[ i ].x == locations[ j ].x && locations[ i ].y == locations[ j ].y )
                throw std::invalid_argument( "locations '" + locations[ i ].name + "' and '" + locations[ j ].name +
                                             "' coincide" );
    seen.clear();
    for ( const auto& o : objects )
        if ( !seen.insert( o ).second )
            throw std::invalid_argument( "duplicate object '" + o + "'" );

    Warehouse w;
    w.locations = locations;
    w.objects = objects;
    auto& u = w.task.universe;
    auto& v = w.vars;
    v.px = u.add( "px", Sort::Real );
    v.py = u.add( "py", Sort::Real );
    v.theta = u.add( "theta", Sort::Real );
    v.holding = u.add( "holding", Sort::Boolean );
    v.carried = locations.size();
    for ( const auto& o : objects )
        v.object_loc.push_back( u.add( "loc_" + o, Sort::Integer, Rational{ 0 }, idx( v.carried ) ) );

    auto& acts = w.task.actions;
    for ( std::size_t l = 0; l < locations.size(); ++l )
    {
        std::vector< Formula > eff{ robot_at( w, l, 1 ) };
        if ( locations[ l ].theta )
            eff.push_back( equals( u, v.theta, *locations[ l ].theta, 1 ) );
        eff.push_back( keep_objects( w, std::nullopt, true ) );
        acts.push_back( { "move(" + locations[ l ].name + ")", top(), conj( std::move( eff ) ) } );
    }
    acts.push_back( { "travel()", top(), keep_objects( w, std::nullopt, true ) } );
    for ( std::size_t o = 0; o < objects.size(); ++o )
    {
        std::vector< Formula > where;
        for ( std::size_t l = 0; l < locations.size(); ++l )
            where.push_back( conj( { equals( u, v.object_loc[ o ], idx( l ) ), robot_at( w, l ) } ) );
        Formula pre = conj( { neg( bool_var( v.holding ) ), disj( std::move( where ) ) } );
        Formula eff = conj( { next( bool_var( v.holding ) ), equals( u, v.object_loc[ o ], idx( v.carried ), 1 ),
                              keep_pose( v ), keep_objects( w, o, false ) } );
        acts.push_back( { "pick(" + objects[ o ] + ")", pre, eff } );
    }
    for ( std::size_t o = 0; o < objects.size(); ++o )
        for ( std::size_t l = 0; l < locations.size(); ++l )
        {
            std::vector< Formula > pre{ bool_var( v.holding ), equals( u, v.object_loc[ o ], idx( v.carried ) ),
                                        robot_at( w, l ) };
            // One object per location.
            for ( std::size_t other = 0; other < objects.size(); ++other )
                if ( other != o )
                    pre.push_back( neg( equals( u, v.object_loc[ other ], idx( l ) ) ) );
            Formula eff = conj( { equals( u, v.object_loc[ o ], idx( l ), 1 ), neg( next( bool_var( v.holding ) ) ),
                                  keep_pose( v ), keep_objects( w, o, false ) } );
            acts.push_back( { "drop(" + objects[ o ] + ", " + locations[ l ].name + ")", conj( std::move( pre ) ), eff } );
        }
    w.task.v0.assign( u.size(), Rational{ 0 } );
    return w;
}

void set_initial( Warehouse& w, const Rational& x, const Rational& y, const Rational& theta,
                  const std::vector< std::size_t >& placement )
{
    if ( placement.size() != w.objects.size() )
        throw std::invalid_argument( "initial placement must list every object" );
    std::set< std::size_t > used;
    for ( auto l : placement )
        if ( l >= w.locations.size() || !used.insert( l ).second )
            throw std::invalid_argument( "initial placement breaks one-object-per-location" );
    auto& v0 = w.task.v0;
    v0[ w.vars.px ] = x;
    v0[ w.vars.py ] = y;
    v0[ w.vars.theta ] = theta;
    v0[ w.vars.holding ] = 0;
    for ( std::size_t o = 0; o < placement.size(); ++o )
        v0[ w.vars.object_loc[ o ] ] = idx( placement[ o ] );
}

void set_goal( Warehouse& w, std::optional< std::size_t > robot, const std::vector< std::size_t >& placement )
{
    if ( placement.size() != w.objects.size() )
        throw std::invalid_argument( "goal placement must list every object" );
    Assignment vf;
    if ( robot )
    {
        const auto& l = w.locations.at( *robot );
        vf.emplace_back( w.vars.px, l.x );
        vf.emplace_back( w.vars.py, l.y );
        if ( l.theta )
            vf.emplace_back( w.vars.theta, *l.theta );
    }
    vf.emplace_back( w.vars.holding, 0 );
    for ( std::size_t o = 0; o < placement.size(); ++o )
        vf.emplace_back( w.vars.object_loc[ o ], idx( placement[ o ] ) );
    w.task.vf = std::move( vf );
}

} // namespace ritmp::taskspec
