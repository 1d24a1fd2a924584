#include "doctest.h"

#include "ritmp/itmp/itmp.hpp"
#include "ritmp/ltlk/parser.hpp"
#include "support/random_geometry.hpp"
#include "support/solvers.hpp"

#include <cstdlib>
#include <random>

using namespace ritmp;
using namespace ritmp::ltlk;
using namespace ritmp::itmp;
using geometry::HPolytope;

namespace
{

// Pose-only robot with one unconstrained "go" action.
PlanRequest free_robot( const HPolytope& boundary, std::vector< HPolytope > obstacles, Rational x0, Rational y0,
                        Rational x1, Rational y1 )
{
    PlanRequest r;
    r.workspace = { boundary, std::move( obstacles ) };
    r.cobstacles = geometry::c_obstacles( r.workspace, 0 );
    auto& t = r.task;
    auto px = t.universe.add( "px", Sort::Real );
    auto py = t.universe.add( "py", Sort::Real );
    t.universe.add( "theta", Sort::Real );
    t.actions.push_back( { "go", top(), top() } );
    t.v0 = { x0, y0, 0 };
    t.vf = { { px, x1 }, { py, y1 } };
    return r;
}

// Task over a bounded counter plus a pose frozen at the origin.
PlanRequest counter_task( int start, int goal, const std::vector< std::pair< std::string, int > >& deltas )
{
    PlanRequest r;
    r.workspace.boundary = geometry::box( -1, -1, 1, 1 );
    auto& t = r.task;
    auto& u = t.universe;
    u.add( "px", Sort::Real );
    u.add( "py", Sort::Real );
    u.add( "theta", Sort::Real );
    auto x = u.add( "x", Sort::Integer, Rational{ -6 }, Rational{ 6 } );
    const std::string frame = " && X px = px && X py = py && X theta = theta";
    for ( const auto& [ name, d ] : deltas )
        t.actions.push_back( { name, top(), parse_formula( "X x = x " + std::string{ d < 0 ? "- " : "+ " } + std::to_string( std::abs( d ) ) + frame, u ) } );
    t.v0 = { 0, 0, 0, start };
    t.vf = { { x, goal } };
    return r;
}

std::size_t bfs_horizon( int start, int goal, const std::vector< std::pair< std::string, int > >& deltas,
                         std::size_t cap )
{
    std::vector< int > frontier{ start };
    for ( std::size_t K = 1; K <= cap; ++K )
    {
        std::vector< int > next;
        for ( int v : frontier )
            for ( const auto& d : deltas )
                if ( v + d.second >= -6 && v + d.second <= 6 )
                    next.push_back( v + d.second );
        std::sort( next.begin(), next.end() );
        next.erase( std::unique( next.begin(), next.end() ), next.end() );
        if ( std::binary_search( next.begin(), next.end(), goal ) )
            return K;
        frontier = std::move( next );
    }
    return 0;
}

} // namespace

TEST_CASE( "noop task is solved at K = 1" )
{
    auto r = counter_task( 2, 2, { { "noop", 0 }, { "inc", 1 } } );
    auto res = itmp::itmp( r, testing::z3_config() );
    REQUIRE( res.status == encoder::Status::Sat );
    REQUIRE( res.plan );
    CHECK( res.plan->K == 1 );
    CHECK( res.plan->action_names == std::vector< std::string >{ "noop" } );
    CHECK( validate_plan( *res.plan, r ).ok );
    CHECK( res.attempts.size() == 1 );
}

TEST_CASE( "inc/dec toy needs two steps" )
{
    auto r = counter_task( 0, 2, { { "inc", 1 }, { "dec", -1 } } );
    auto res = itmp::itmp( r, testing::z3_config() );
    REQUIRE( res.plan );
    CHECK( res.plan->K == 2 );
    CHECK( res.plan->T == std::vector< std::size_t >{ 1, 1 } );
    CHECK( res.attempts.front().status == encoder::Status::Unsat );
    CHECK( validate_plan( *res.plan, r ).ok );
}

TEST_CASE( "wall across the workspace makes the goal unreachable" )
{
    auto r = free_robot( geometry::box( 0, 0, 10, 4 ), { geometry::box( 4, -1, 6, 5 ) }, 1, 2, 9, 2 );
    r.K_max = 5;
    auto res = itmp::itmp( r, testing::z3_config() );
    CHECK( res.status == encoder::Status::Unsat );
    CHECK_FALSE( res.plan );
    CHECK( res.attempts.size() == 5 );
    CHECK( res.diagnostic == "no plan up to K_max = 5" );
}

TEST_CASE( "without obstacles every polytope is the workspace" )
{
    auto ws = geometry::box( 0, 0, 10, 4 );
    auto r = free_robot( ws, {}, 1, 2, 9, 3 );
    auto res = itmp::itmp( r, testing::z3_config() );
    REQUIRE( res.plan );
    CHECK( res.plan->K == 1 );
    for ( const auto& P : res.plan->P.polytopes )
        CHECK( P == ws );
}

TEST_CASE( "one obstacle between start and goal: detour of three segments" )
{
    // Start and goal each lie in exactly one outward half-plane (x <= 4, x >= 6), so a middle
    // point must go over or under the block.
    auto r = free_robot( geometry::box( 0, 0, 10, 4 ), { geometry::box( 4, 1, 6, 3 ) }, 1, 2, 9, 2 );
    auto res = itmp::itmp( r, testing::z3_config() );
    REQUIRE( res.plan );
    const auto& plan = *res.plan;
    CHECK( plan.K == 3 );
    for ( std::size_t K = 1; K < plan.K; ++K )
    {
        auto f = plan_formula( r );
        CHECK( encoder::solve( encoder::encode( f.phi, K, f.task.universe ), testing::z3_config() ).status ==
               encoder::Status::Unsat );
    }
    auto rep = validate_plan( plan, r );
    for ( const auto& c : rep.checks )
        CHECK_MESSAGE( c.ok, c.name, ": ", c.detail );
    for ( std::size_t k = 0; k + 1 < plan.K; ++k )
        CHECK( geometry::polytopes_intersect( plan.P.polytopes[ k ], plan.P.polytopes[ k + 1 ] ) );
}

TEST_CASE( "hand-corrupted plans are rejected" )
{
    auto r = free_robot( geometry::box( 0, 0, 10, 4 ), { geometry::box( 4, 1, 6, 3 ) }, 1, 2, 9, 2 );
    auto res = itmp::itmp( r, testing::z3_config() );
    REQUIRE( res.plan );

    SUBCASE( "action index 0" )
    {
        auto p = *res.plan;
        p.T[ 0 ] = 0;
        auto rep = validate_plan( p, r );
        CHECK_FALSE( rep.ok );
        CHECK_FALSE( rep.find( "action-range" )->ok );
    }
    SUBCASE( "waypoint inside the obstacle" )
    {
        auto p = *res.plan;
        p.Y[ 0 ] = { 5, 2, 0 };
        auto rep = validate_plan( p, r );
        CHECK_FALSE( rep.ok );
        CHECK_FALSE( rep.find( "containment" )->ok );
        CHECK_FALSE( rep.find( "polyline" )->ok );
    }
    SUBCASE( "truncated tunnel" )
    {
        auto p = *res.plan;
        p.P.polytopes.pop_back();
        auto rep = validate_plan( p, r );
        CHECK_FALSE( rep.ok );
        CHECK_FALSE( rep.find( "shape" )->ok );
    }
}

TEST_CASE( "extract_plan rejects a trace that jumps through an obstacle" )
{
    auto r = free_robot( geometry::box( 0, 0, 10, 4 ), { geometry::box( 4, 1, 6, 3 ) }, 1, 2, 9, 2 );
    auto f = plan_formula( r );
    BoundedTrace t{ 1, f.task.universe.size() };
    t.steps = { { 1, 2, 0, 1 }, { 9, 2, 0, 1 } };
    CHECK_THROWS_AS( extract_plan( t, r, f ), SelectorInconsistency );
}

TEST_CASE( "minimal horizon matches breadth-first search on counter tasks" )
{
    const std::vector< std::pair< std::string, int > > moves{ { "inc", 1 }, { "dec", -1 }, { "jump", 3 } };
    for ( int goal : { 0, 1, 2, 3, 4, 5, -2 } )
    {
        CAPTURE( goal );
        auto r = counter_task( 0, goal, moves );
        r.K_max = 4;
        auto res = itmp::itmp( r, testing::z3_config() );
        std::size_t expected = bfs_horizon( 0, goal, moves, 4 );
        REQUIRE( expected > 0 );
        REQUIRE( res.plan );
        CHECK( res.plan->K == expected );
        CHECK( validate_plan( *res.plan, r ).ok );
    }
}

TEST_CASE( "property: plans on random layouts validate" )
{
    std::mt19937_64 rng{ 77 };
    std::uniform_int_distribution< int > cell{ 0, 1 };
    int sat = 0;
    for ( int trial = 0; trial < 12; ++trial )
    {
        std::vector< HPolytope > obs;
        for ( int i = 0; i < 2; ++i )
            obs.push_back( geometry::from_vertices( testing::random_convex( rng, 5, 2 + 4 * i, 1 + cell( rng ), 2, 2 ) ) );
        auto r = free_robot( geometry::box( 0, 0, 12, 6 ), obs, Rational{ 1, 2 }, 3, Rational{ 23, 2 }, 3 );
        r.K_max = 6;
        auto res = itmp::itmp( r, testing::z3_config() );
        if ( !res.plan )
            continue;
        ++sat;
        auto rep = validate_plan( *res.plan, r );
        for ( const auto& c : rep.checks )
            CHECK_MESSAGE( c.ok, "trial ", trial, " ", c.name, ": ", c.detail );
    }
    CHECK( sat > 6 );
}
