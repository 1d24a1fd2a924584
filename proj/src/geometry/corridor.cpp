#include "ritmp/geometry/corridor.hpp"

#include <stdexcept>

namespace ritmp::geometry
{

using namespace ritmp::ltlk;

void validate_workspace( const Workspace& ws )
{
    if ( !is_bounded( ws.boundary ) )
        throw std::invalid_argument( "workspace boundary is empty or unbounded" );
    for ( std::size_t i = 0; i < ws.obstacles.size(); ++i )
        if ( is_empty( ws.obstacles[ i ] ) )
            throw EmptyObstacle( "obstacle " + std::to_string( i ) + " is empty" );
}

CObstacle c_obstacle( const HPolytope& obstacle, const Rational& radius, std::size_t source )
{
    if ( radius < 0 )
        throw std::invalid_argument( "negative inflation radius" );
    if ( is_empty( obstacle ) )
        throw EmptyObstacle( "obstacle " + std::to_string( source ) + " is empty" );
    std::vector< Facet > facets;
    facets.reserve( obstacle.size() );
    for ( const auto& f : obstacle.facets() )
        facets.push_back( { f.hx, f.hy, f.c + radius * sqrt_upper( f.hx * f.hx + f.hy * f.hy ) } );
    return { HPolytope{ std::move( facets ) }, source, radius };
}

std::vector< CObstacle > c_obstacles( const Workspace& ws, const Rational& radius )
{
    std::vector< CObstacle > out;
    for ( std::size_t i = 0; i < ws.obstacles.size(); ++i )
        out.push_back( c_obstacle( ws.obstacles[ i ], radius, i ) );
    return out;
}

Facet outward( const Facet& f ) { return { -f.hx, -f.hy, -f.c }; }

namespace
{

Formula half_plane( const Facet& f, VarId px, VarId py )
{
    std::vector< std::pair< Rational, TemporalTerm > > terms;
    if ( f.hx != 0 )
        terms.emplace_back( f.hx, TemporalTerm{ px, 0 } );
    if ( f.hy != 0 )
        terms.emplace_back( f.hy, TemporalTerm{ py, 0 } );
    return linear( std::move( terms ), Relation::Le, f.c );
}

} // namespace

Formula build_phi_safe( const Workspace& ws, const std::vector< CObstacle >& cobs, VarId px, VarId py )
{
    std::vector< Formula > parts;
    for ( const auto& w : ws.boundary.facets() )
        parts.push_back( half_plane( w, px, py ) );
    for ( const auto& cob : cobs )
    {
        std::vector< Formula > sides;
        for ( const auto& g : cob.inflated.facets() )
        {
            Formula b = half_plane( outward( g ), px, py );
            sides.push_back( conj( { b, next( b ) } ) );
        }
        parts.push_back( disj( std::move( sides ) ) );
    }
    return always( conj( std::move( parts ) ) );
}

std::optional< std::size_t > shared_outward_facet( const CObstacle& cob, const Point& a, const Point& b )
{
    const auto& fs = cob.inflated.facets();
    for ( std::size_t j = 0; j < fs.size(); ++j )
    {
        Facet o = outward( fs[ j ] );
        if ( o.contains( a ) && o.contains( b ) )
            return j;
    }
    return std::nullopt;
}

HPolytope segment_polytope( const Workspace& ws, const std::vector< CObstacle >& cobs, const Point& a,
                            const Point& b )
{
    std::vector< Facet > facets = ws.boundary.facets();
    for ( std::size_t i = 0; i < cobs.size(); ++i )
    {
        auto j = shared_outward_facet( cobs[ i ], a, b );
        if ( !j )
            throw std::runtime_error( "no outward half-plane of C-obstacle " + std::to_string( i ) +
                                      " holds at both ends of the segment" );
        facets.push_back( outward( cobs[ i ].inflated.facets()[ *j ] ) );
    }
    return HPolytope{ std::move( facets ) };
}

TunnelReport tunnel_valid( const Tunnel& tunnel, const Workspace& ws, const std::vector< CObstacle >& cobs )
{
    const auto& ps = tunnel.polytopes;
    if ( ps.empty() )
        return { false, "empty tunnel" };
    for ( std::size_t k = 0; k < ps.size(); ++k )
    {
        const std::string idx = std::to_string( k + 1 );
        if ( is_empty( ps[ k ] ) )
            return { false, "polytope " + idx + " is empty" };
        if ( !contained_in( ps[ k ], ws.boundary ) )
            return { false, "polytope " + idx + " leaves the workspace" };
        for ( std::size_t i = 0; i < cobs.size(); ++i )
            if ( meets_interior( ps[ k ], cobs[ i ].inflated ) )
                return { false, "polytope " + idx + " meets C-obstacle " + std::to_string( i + 1 ) };
        if ( k + 1 < ps.size() && !polytopes_intersect( ps[ k ], ps[ k + 1 ] ) )
            return { false, "gap between " + idx + " and " + std::to_string( k + 2 ) };
    }
    return {};
}

} // namespace ritmp::geometry
