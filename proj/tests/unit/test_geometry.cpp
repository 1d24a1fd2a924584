#include "doctest.h"

#include "ritmp/geometry/corridor.hpp"
#include "ritmp/ltlk/eval.hpp"
#include "support/random_geometry.hpp"

using namespace ritmp;
using namespace ritmp::geometry;

namespace
{

Rational q( long n, long d = 1 ) { return Rational{ n, d }; }

int orient( const Point& o, const Point& a, const Point& b )
{
    Rational c = ( a.x - o.x ) * ( b.y - o.y ) - ( a.y - o.y ) * ( b.x - o.x );
    return sgn( c );
}

bool on_segment( const Point& a, const Point& b, const Point& p )
{
    return std::min( a.x, b.x ) <= p.x && p.x <= std::max( a.x, b.x ) && std::min( a.y, b.y ) <= p.y &&
           p.y <= std::max( a.y, b.y );
}

bool segments_touch( const Point& a, const Point& b, const Point& c, const Point& d )
{
    int o1 = orient( a, b, c ), o2 = orient( a, b, d ), o3 = orient( c, d, a ), o4 = orient( c, d, b );
    if ( o1 * o2 < 0 && o3 * o4 < 0 )
        return true;
    return ( o1 == 0 && on_segment( a, b, c ) ) || ( o2 == 0 && on_segment( a, b, d ) ) ||
           ( o3 == 0 && on_segment( c, d, a ) ) || ( o4 == 0 && on_segment( c, d, b ) );
}

// Vertex/edge oracle for closed convex polygons.
bool polygons_touch( const std::vector< Point >& a, const std::vector< Point >& b )
{
    HPolytope pa = from_vertices( a ), pb = from_vertices( b );
    for ( const auto& v : a )
        if ( pb.contains( v ) )
            return true;
    for ( const auto& v : b )
        if ( pa.contains( v ) )
            return true;
    for ( std::size_t i = 0; i < a.size(); ++i )
        for ( std::size_t j = 0; j < b.size(); ++j )
            if ( segments_touch( a[ i ], a[ ( i + 1 ) % a.size() ], b[ j ], b[ ( j + 1 ) % b.size() ] ) )
                return true;
    return false;
}

} // namespace

TEST_CASE( "polytopes_intersect: boxes" )
{
    auto unit = box( 0, 0, 1, 1 );
    CHECK( polytopes_intersect( unit, box( q( 1, 2 ), q( 1, 2 ), q( 3, 2 ), q( 3, 2 ) ) ) );
    CHECK_FALSE( polytopes_intersect( unit, box( 2, 2, 3, 3 ) ) );
    CHECK( polytopes_intersect( unit, box( 1, 0, 2, 1 ) ) );
    CHECK( polytopes_intersect( unit, box( 1, 1, 2, 2 ) ) );
    CHECK_FALSE( meets_interior( box( 1, 0, 2, 1 ), unit ) );
    CHECK( meets_interior( box( q( 99, 100 ), 0, 2, 1 ), unit ) );
}

TEST_CASE( "find_point honours strict rows" )
{
    // x <= 1, x > 1
    CHECK_FALSE( feasible( { { { 1, 0, 1 }, false }, { { -1, 0, -1 }, true } } ) );
    // x <= 1, x >= 1, y < 2, y > 1
    auto p = find_point( { { { 1, 0, 1 }, false },
                           { { -1, 0, -1 }, false },
                           { { 0, 1, 2 }, true },
                           { { 0, -1, -1 }, true } } );
    REQUIRE( p );
    CHECK( p->x == 1 );
    CHECK( p->y > 1 );
    CHECK( p->y < 2 );
    CHECK_FALSE( feasible( { { { 0, 0, -1 }, false } } ) );
    CHECK_FALSE( feasible( { { { 0, 0, 0 }, true } } ) );
    CHECK( feasible( {} ) );
}

TEST_CASE( "boundedness" )
{
    CHECK( is_bounded( box( 0, 0, 1, 1 ) ) );
    CHECK_FALSE( is_bounded( HPolytope{ { { 1, 0, 1 }, { 0, 1, 1 } } } ) );
    CHECK_FALSE( is_bounded( HPolytope{ { { 1, 0, 1 }, { -1, 0, 0 }, { 0, 1, 1 } } } ) );
    CHECK_FALSE( is_bounded( HPolytope{} ) );
    CHECK_FALSE( is_bounded( HPolytope{ { { 1, 0, 0 }, { -1, 0, -1 }, { 0, 1, 1 }, { 0, -1, 0 } } } ) );
    CHECK( is_bounded( from_vertices( { { 0, 0 }, { 2, 0 }, { 1, 1 } } ) ) );
    CHECK_THROWS_AS( HPolytope( { { 0, 0, 1 } } ), std::invalid_argument );
}

TEST_CASE( "vertices of a box come back counter-clockwise" )
{
    auto v = vertices( box( 0, 0, 2, 1 ) );
    REQUIRE( v.size() == 4 );
    CHECK( v[ 0 ] == Point{ 0, 0 } );
    CHECK( v[ 1 ] == Point{ 2, 0 } );
    CHECK( v[ 2 ] == Point{ 2, 1 } );
    CHECK( v[ 3 ] == Point{ 0, 1 } );
}

TEST_CASE( "c_obstacle examples" )
{
    auto unit = box( 0, 0, 1, 1 );
    CHECK( c_obstacle( unit, 0 ).inflated == unit );
    auto wide = c_obstacle( HPolytope{ { { 1, 0, 1 }, { -1, 0, 0 }, { 0, 1, 1 }, { 0, -1, 0 } } }, q( 1, 2 ) );
    CHECK( wide.inflated.facets()[ 0 ] == Facet{ 1, 0, q( 3, 2 ) } );
    // |(3,4)| = 5 exactly
    auto tilted = c_obstacle( HPolytope{ { { 3, 4, 0 }, { -1, 0, 0 }, { 0, -1, 0 } } }, 2 );
    CHECK( tilted.inflated.facets()[ 0 ].c == 10 );
    CHECK_THROWS_AS( c_obstacle( HPolytope{ { { 1, 0, 0 }, { -1, 0, -1 } } }, 1 ), EmptyObstacle );
}

TEST_CASE( "property: inflation covers the D_s neighbourhood and is monotone" )
{
    std::mt19937_64 rng{ 21 };
    std::uniform_real_distribution< double > u{ -3.0, 6.0 };
    for ( int iter = 0; iter < 60; ++iter )
    {
        auto poly = testing::random_convex( rng, 7, 0, 0, 3, 3 );
        HPolytope p = from_vertices( poly );
        Rational ds{ static_cast< long >( rng() % 8 + 1 ), 8 };
        auto cob = c_obstacle( p, ds );
        for ( const auto& v : poly )
            CHECK( cob.inflated.contains( v ) );
        for ( int s = 0; s < 400; ++s )
        {
            double x = u( rng ), y = u( rng );
            if ( testing::distance_to_polygon( x, y, poly ) < ds.get_d() * ( 1 - 1e-12 ) )
                CHECK( cob.inflated.contains( { rational_from_double( x ), rational_from_double( y ) } ) );
        }
        auto bigger = c_obstacle( p, ds + Rational{ 1, 16 } );
        for ( std::size_t j = 0; j < p.size(); ++j )
            CHECK( cob.inflated.facets()[ j ].c <= bigger.inflated.facets()[ j ].c );
        CHECK( contained_in( cob.inflated, bigger.inflated ) );
    }
}

TEST_CASE( "property: FM intersection agrees with the vertex/edge oracle" )
{
    std::mt19937_64 rng{ 5 };
    int hits = 0;
    for ( int iter = 0; iter < 600; ++iter )
    {
        auto a = testing::random_convex( rng, 8, 0, 0, 4, 4, 2 );
        auto b = testing::random_convex( rng, 8, static_cast< int >( rng() % 5 ), static_cast< int >( rng() % 5 ), 3,
                                         3, 2 );
        bool fm = polytopes_intersect( from_vertices( a ), from_vertices( b ) );
        CHECK( fm == polygons_touch( a, b ) );
        hits += fm;
        CHECK( vertices( from_vertices( a ) ) == a );
    }
    CHECK( hits > 100 );
    CHECK( hits < 550 );
}

TEST_CASE( "build_phi_safe structure" )
{
    ltlk::VariableUniverse u;
    auto px = u.add( "px", ltlk::Sort::Real );
    auto py = u.add( "py", ltlk::Sort::Real );
    Workspace ws{ box( 0, 0, 10, 10 ), {} };
    auto free = build_phi_safe( ws, {}, px, py );
    REQUIRE( free.op() == ltlk::Op::Always );
    CHECK( free.child().op() == ltlk::Op::And );
    CHECK( free.child().children().size() == 4 );
    CHECK( ltlk::to_string( free, u ) == "G (px <= 10 && py <= 10 && -px <= 0 && -py <= 0)" );

    ws.obstacles.push_back( box( 4, 4, 6, 6 ) );
    auto one = build_phi_safe( ws, c_obstacles( ws, 0 ), px, py );
    const auto& obst = one.child().children().back();
    REQUIRE( obst.op() == ltlk::Op::Or );
    CHECK( obst.children().size() == 4 );
    CHECK( obst.child( 0 ).child( 1 ).op() == ltlk::Op::Next );
}

TEST_CASE( "property: phi_safe holds iff consecutive positions share an outward half-plane" )
{
    ltlk::VariableUniverse u;
    auto px = u.add( "px", ltlk::Sort::Real );
    auto py = u.add( "py", ltlk::Sort::Real );
    Workspace ws{ box( 0, 0, 10, 10 ), { box( 3, 0, 4, 6 ), box( 6, 4, 7, 10 ) } };
    auto cobs = c_obstacles( ws, q( 1, 2 ) );
    auto phi = build_phi_safe( ws, cobs, px, py );

    auto direct = [ & ]( const std::vector< Point >& pts ) {
        for ( std::size_t k = 0; k < pts.size(); ++k )
        {
            if ( !ws.boundary.contains( pts[ k ] ) )
                return false;
            const Point& nxt = pts[ std::min( k + 1, pts.size() - 1 ) ];
            for ( const auto& c : cobs )
            {
                bool shared = false;
                for ( const auto& g : c.inflated.facets() )
                    shared = shared || ( -g.eval( pts[ k ] ) <= -g.c && -g.eval( nxt ) <= -g.c );
                if ( !shared )
                    return false;
            }
        }
        return true;
    };
    auto trace_of = [ & ]( const std::vector< Point >& pts ) {
        ltlk::BoundedTrace t{ pts.size() - 1, u.size() };
        for ( std::size_t k = 0; k < pts.size(); ++k )
        {
            t.value( px, k ) = pts[ k ].x;
            t.value( py, k ) = pts[ k ].y;
        }
        return t;
    };

    // Threads below the second obstacle and above the first.
    std::vector< Point > thread{ { 1, 1 }, { 1, 8 }, { 5, 8 }, { 5, 2 }, { 9, 2 }, { 9, 9 } };
    CHECK( direct( thread ) );
    CHECK( ltlk::satisfies_prefix( phi, trace_of( thread ) ) );
    // Jumping straight across the first obstacle fails.
    std::vector< Point > jump{ { 1, 1 }, { 5, 2 } };
    CHECK_FALSE( direct( jump ) );
    CHECK_FALSE( ltlk::satisfies_prefix( phi, trace_of( jump ) ) );

    std::mt19937_64 rng{ 9 };
    int sat = 0;
    for ( int iter = 0; iter < 400; ++iter )
    {
        std::vector< Point > pts;
        std::size_t n = rng() % 4 + 1;
        for ( std::size_t k = 0; k < n; ++k )
            pts.push_back( { q( static_cast< long >( rng() % 23 ) - 1, 2 ), q( static_cast< long >( rng() % 23 ) - 1, 2 ) } );
        bool d = direct( pts );
        CHECK( ltlk::satisfies_prefix( phi, trace_of( pts ) ) == d );
        sat += d;
    }
    CHECK( sat > 10 );
}

TEST_CASE( "tunnel_valid examples" )
{
    Workspace ws{ box( 0, 0, 10, 10 ), {} };
    CHECK( tunnel_valid( { { ws.boundary } }, ws, {} ).ok );

    auto gap = tunnel_valid( { { box( 0, 0, 1, 1 ), box( 2, 2, 3, 3 ) } }, ws, {} );
    CHECK_FALSE( gap.ok );
    CHECK( gap.violation == "gap between 1 and 2" );

    auto outside = tunnel_valid( { { box( 9, 9, 11, 10 ) } }, ws, {} );
    CHECK( outside.violation == "polytope 1 leaves the workspace" );

    ws.obstacles.push_back( box( 4, 4, 6, 6 ) );
    auto cobs = c_obstacles( ws, q( 1, 2 ) );
    auto hit = tunnel_valid( { { box( 0, 0, 2, 2 ), box( 0, 0, 5, 5 ) } }, ws, cobs );
    CHECK( hit.violation == "polytope 2 meets C-obstacle 1" );
    // Touching the inflated boundary is allowed.
    CHECK( tunnel_valid( { { box( 0, 0, q( 7, 2 ), 10 ), box( 0, 0, 10, q( 7, 2 ) ) } }, ws, cobs ).ok );

    CHECK( tunnel_valid( { { HPolytope{ { { 1, 0, 0 }, { -1, 0, -1 } } } } }, ws, {} ).violation ==
           "polytope 1 is empty" );
    CHECK_FALSE( tunnel_valid( {}, ws, {} ).ok );
}

TEST_CASE( "segment polytope and segment clearance" )
{
    Workspace ws{ box( 0, 0, 10, 10 ), { box( 4, 4, 6, 6 ) } };
    auto cobs = c_obstacles( ws, 0 );
    auto p = segment_polytope( ws, cobs, { 1, 1 }, { 9, 1 } );
    CHECK( p.contains( { 1, 1 } ) );
    CHECK( p.contains( { 9, 1 } ) );
    CHECK_FALSE( meets_interior( p, cobs[ 0 ].inflated ) );
    CHECK_THROWS_AS( segment_polytope( ws, cobs, { 1, 1 }, { 9, 9 } ), std::runtime_error );

    CHECK( segment_meets_interior( { 1, 1 }, { 9, 9 }, cobs[ 0 ].inflated ) );
    CHECK_FALSE( segment_meets_interior( { 1, 4 }, { 9, 4 }, cobs[ 0 ].inflated ) );
    CHECK_FALSE( segment_meets_interior( { 0, 10 }, { 10, 0 }, box( 5, 5, 6, 6 ) ) );
    CHECK( segment_meets_interior( { 0, 11 }, { 11, 0 }, box( 5, 5, 6, 6 ) ) );
    CHECK( segment_meets_interior( { 5, 5 }, { 5, 5 }, box( 4, 4, 6, 6 ) ) );
}

TEST_CASE( "workspace validation" )
{
    CHECK_NOTHROW( validate_workspace( { box( 0, 0, 1, 1 ), { box( 0, 0, q( 1, 2 ), q( 1, 2 ) ) } } ) );
    CHECK_THROWS( validate_workspace( { HPolytope{ { { 1, 0, 1 } } }, {} } ) );
    CHECK_THROWS_AS( validate_workspace( { box( 0, 0, 1, 1 ), { HPolytope{ { { 1, 0, 0 }, { -1, 0, -1 } } } } } ),
                     EmptyObstacle );
}
