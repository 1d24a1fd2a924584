#include "doctest.h"

#include "ritmp/encoder/encoder.hpp"
#include "ritmp/ltlk/eval.hpp"
#include "ritmp/ltlk/parser.hpp"
#include "ritmp/taskspec/warehouse.hpp"
#include "support/solvers.hpp"

#include <deque>
#include <map>
#include <set>

using namespace ritmp;
using namespace ritmp::ltlk;
using namespace ritmp::taskspec;

namespace
{

encoder::Status status_at( const Formula& phi, const VariableUniverse& u, std::size_t K )
{
    return encoder::solve( encoder::encode( phi, K, u ), testing::z3_config() ).status;
}

std::vector< NamedLocation > fig1_locations()
{
    return { { "W0", 1, 1, {} }, { "W1", 1, 4, {} }, { "W2", 4, 4, {} },
             { "W3", 7, 4, {} }, { "W4", 7, 1, {} }, { "R1H", 4, 0, {} } };
}

// Independent semantics of the warehouse actions for breadth-first search over sequences.
struct Abstract
{
    int robot;
    bool holding;
    std::vector< int > objects;
    auto operator<=>( const Abstract& ) const = default;
};

std::optional< Abstract > apply( const Warehouse& w, const Abstract& s, const std::string& name )
{
    const int L = static_cast< int >( w.locations.size() );
    Abstract n = s;
    for ( int l = 0; l < L; ++l )
        if ( name == "move(" + w.locations[ l ].name + ")" )
        {
            n.robot = l;
            return n;
        }
    for ( std::size_t o = 0; o < w.objects.size(); ++o )
    {
        if ( name == "pick(" + w.objects[ o ] + ")" )
        {
            if ( s.holding || s.robot < 0 || s.objects[ o ] != s.robot )
                return std::nullopt;
            n.holding = true;
            n.objects[ o ] = L;
            return n;
        }
        for ( int l = 0; l < L; ++l )
            if ( name == "drop(" + w.objects[ o ] + ", " + w.locations[ l ].name + ")" )
            {
                if ( !s.holding || s.objects[ o ] != L || s.robot != l )
                    return std::nullopt;
                for ( std::size_t p = 0; p < w.objects.size(); ++p )
                    if ( p != o && s.objects[ p ] == l )
                        return std::nullopt;
                n.holding = false;
                n.objects[ o ] = l;
                return n;
            }
    }
    return std::nullopt;
}

// Shortest action sequence (travel excluded) reaching the goal placement.
std::vector< std::string > shortest( const Warehouse& w, const Abstract& start, const std::vector< int >& goal,
                                     std::size_t max_len )
{
    std::deque< std::pair< Abstract, std::vector< std::string > > > q{ { start, {} } };
    std::set< Abstract > seen{ start };
    while ( !q.empty() )
    {
        auto [ s, path ] = q.front();
        q.pop_front();
        if ( !s.holding && s.objects == goal )
            return path;
        if ( path.size() == max_len )
            continue;
        for ( const auto& a : w.task.actions )
            if ( auto n = apply( w, s, a.name ); n && seen.insert( *n ).second )
            {
                auto p = path;
                p.push_back( a.name );
                q.emplace_back( *n, p );
            }
    }
    return {};
}

} // namespace

TEST_CASE( "noop task: SAT iff vf = v0" )
{
    TaskLanguage t;
    auto v = t.universe.add( "v", Sort::Real );
    t.actions.push_back( { "noop", top(), parse_formula( "X v = v", t.universe ) } );
    t.v0 = { 3 };
    t.vf = { { v, 3 } };
    auto enc = build_phi_task( t );
    CHECK( enc.universe.size() == 2 );
    CHECK( enc.universe[ enc.action ].sort == Sort::Integer );
    for ( std::size_t K = 1; K <= 3; ++K )
        CHECK( status_at( enc.phi, enc.universe, K ) == encoder::Status::Sat );
    t.vf = { { v, 4 } };
    auto bad = build_phi_task( t );
    for ( std::size_t K = 1; K <= 3; ++K )
        CHECK( status_at( bad.phi, bad.universe, K ) == encoder::Status::Unsat );
}

TEST_CASE( "inc/dec toy: minimal horizon 2 with (inc, inc)" )
{
    TaskLanguage t;
    auto x = t.universe.add( "x", Sort::Integer, Rational{ -5 }, Rational{ 5 } );
    t.actions.push_back( { "inc", top(), parse_formula( "X x = x + 1", t.universe ) } );
    t.actions.push_back( { "dec", top(), parse_formula( "X x = x - 1", t.universe ) } );
    t.v0 = { 0 };
    t.vf = { { x, 2 } };
    auto enc = build_phi_task( t );

    // Brute force over all action sequences up to length 4.
    std::size_t best = 0;
    for ( std::size_t len = 1; len <= 4 && best == 0; ++len )
        for ( unsigned mask = 0; mask < ( 1u << len ); ++mask )
        {
            int value = 0;
            for ( std::size_t i = 0; i < len; ++i )
                value += ( mask >> i ) & 1 ? -1 : 1;
            if ( value == 2 )
                best = len;
        }
    CHECK( best == 2 );

    CHECK( status_at( enc.phi, enc.universe, 1 ) == encoder::Status::Unsat );
    auto r = encoder::solve( encoder::encode( enc.phi, 2, enc.universe ), testing::z3_config() );
    REQUIRE( r.status == encoder::Status::Sat );
    auto trace = encoder::decode_model( r, enc.universe, 2 );
    CHECK( trace.value( enc.action, 0 ) == 1 );
    CHECK( trace.value( enc.action, 1 ) == 1 );
    CHECK( check_plan_against_task( trace, t, enc ).ok );
}

TEST_CASE( "check_plan_against_task" )
{
    TaskLanguage t;
    auto x = t.universe.add( "x", Sort::Integer, Rational{ -5 }, Rational{ 5 } );
    t.actions.push_back( { "inc", top(), parse_formula( "X x = x + 1", t.universe ) } );
    t.v0 = { 0 };
    t.vf = { { x, 0 } };
    auto enc = build_phi_task( t );
    BoundedTrace empty{ 0, 2 };
    empty.value( enc.action, 0 ) = 1;
    CHECK( check_plan_against_task( empty, t, enc ).ok );

    t.vf = { { x, 3 } };
    BoundedTrace plan{ 3, 2 };
    for ( std::size_t k = 0; k <= 3; ++k )
    {
        plan.value( x, k ) = static_cast< long >( k );
        plan.value( enc.action, k ) = 1;
    }
    CHECK( check_plan_against_task( plan, t, enc ).ok );
    plan.value( x, 2 ) = 5;
    auto bad = check_plan_against_task( plan, t, enc );
    CHECK_FALSE( bad.ok );
    CHECK( bad.step == 2 );
    CHECK( bad.reason == "effect of inc fails" );
    plan.value( x, 2 ) = 2;
    plan.value( enc.action, 1 ) = 0;
    auto range = check_plan_against_task( plan, t, enc );
    CHECK( range.step == 2 );
    CHECK( range.reason.find( "out of range" ) != std::string::npos );
    plan.value( enc.action, 1 ) = 1;
    plan.value( x, 0 ) = 1;
    CHECK( check_plan_against_task( plan, t, enc ).reason == "initial state differs from v0" );
}

TEST_CASE( "task validation" )
{
    TaskLanguage t;
    t.universe.add( "x", Sort::Integer, Rational{ 0 }, Rational{ 1 } );
    t.v0 = { 0 };
    CHECK_THROWS( build_phi_task( t ) );
    t.actions = { { "a", top(), top() }, { "a", top(), top() } };
    CHECK_THROWS_WITH( build_phi_task( t ), "duplicate action name 'a'" );
    t.actions.pop_back();
    t.v0 = { 2 };
    CHECK_THROWS( build_phi_task( t ) );
    CHECK_THROWS( warehouse_actions( { { "A", 0, 0, {} }, { "A", 1, 1, {} } }, {} ) );
    CHECK_THROWS( warehouse_actions( { { "A", 0, 0, {} }, { "B", 0, 0, {} } }, {} ) );
    CHECK_THROWS( warehouse_actions( { { "A", 0, 0, {} } }, { "o", "o" } ) );
}

TEST_CASE( "warehouse action library" )
{
    Warehouse w = warehouse_actions( fig1_locations(), { "o1", "o2" } );
    CHECK( w.task.actions.size() == 6 + 1 + 2 + 12 );
    CHECK( w.task.actions[ 0 ].name == "move(W0)" );
    CHECK( w.task.actions[ 6 ].name == "travel()" );
    CHECK( w.task.actions[ 7 ].name == "pick(o1)" );
    CHECK( w.task.actions[ 9 ].name == "drop(o1, W0)" );
    CHECK( w.vars.carried == 6 );
    set_initial( w, 4, 0, 0, { 1, 3 } );
    auto enc = build_phi_task( w.task );
    const auto& u = enc.universe;

    auto state = [ & ]( Rational x, Rational y, bool holding, long o1, long o2 ) {
        BoundedTrace t{ 1, u.size() };
        for ( std::size_t k = 0; k <= 1; ++k )
        {
            t.value( w.vars.px, k ) = x;
            t.value( w.vars.py, k ) = y;
            t.value( w.vars.holding, k ) = holding ? 1 : 0;
            t.value( w.vars.object_loc[ 0 ], k ) = o1;
            t.value( w.vars.object_loc[ 1 ], k ) = o2;
        }
        return t;
    };
    const auto& pick_o1 = w.task.actions[ 7 ];
    // Wrong position: robot at W0, o1 at W1.
    CHECK_FALSE( eval_formula( pick_o1.pre, state( 1, 1, false, 1, 3 ), 0 ) );
    CHECK( eval_formula( pick_o1.pre, state( 1, 4, false, 1, 3 ), 0 ) );
    // Gripper already full.
    CHECK_FALSE( eval_formula( pick_o1.pre, state( 1, 4, true, 1, 3 ), 0 ) );
    // Drop onto an occupied location is excluded.
    const auto& drop_o1_w3 = w.task.actions[ 9 + 3 ];
    REQUIRE( drop_o1_w3.name == "drop(o1, W3)" );
    CHECK_FALSE( eval_formula( drop_o1_w3.pre, state( 7, 4, true, 6, 3 ), 0 ) );
    CHECK( eval_formula( w.task.actions[ 9 + 4 ].pre, state( 7, 1, true, 6, 3 ), 0 ) );

    // Picking first thing from R1H is infeasible at K = 1.
    Formula forced = conj( { enc.phi, equals( u, enc.action, Rational{ 8 } ) } );
    CHECK( status_at( forced, u, 1 ) == encoder::Status::Unsat );
}

TEST_CASE( "fetch task: move-pick-move-drop is the shortest plan" )
{
    Warehouse w = warehouse_actions( fig1_locations(), { "o1", "o2" } );
    set_initial( w, 4, 0, 0, { 1, 3 } );
    set_goal( w, std::nullopt, { 4, 3 } );

    auto path = shortest( w, Abstract{ 5, false, { 1, 3 } }, { 4, 3 }, 6 );
    REQUIRE( path.size() == 4 );
    CHECK( path == std::vector< std::string >{ "move(W1)", "pick(o1)", "move(W4)", "drop(o1, W4)" } );

    auto enc = build_phi_task( w.task );
    CHECK( status_at( enc.phi, enc.universe, 3 ) == encoder::Status::Unsat );
    auto r = encoder::solve( encoder::encode( enc.phi, 4, enc.universe ), testing::z3_config() );
    REQUIRE( r.status == encoder::Status::Sat );
    auto trace = encoder::decode_model( r, enc.universe, 4 );
    CHECK( satisfies_prefix( enc.phi, trace ) );
    CHECK( check_plan_against_task( trace, w.task, enc ).ok );
    std::vector< std::string > names;
    for ( std::size_t k = 0; k < 4; ++k )
        names.push_back( w.task.actions[ trace.value( enc.action, k ).get_num().get_ui() - 1 ].name );
    CHECK( names[ 1 ] == "pick(o1)" );
    CHECK( names[ 3 ] == "drop(o1, W4)" );
}

TEST_CASE( "property: object conservation in solver plans" )
{
    Warehouse w = warehouse_actions( fig1_locations(), { "o1", "o2" } );
    set_initial( w, 4, 0, 0, { 1, 3 } );
    const std::vector< std::vector< std::size_t > > goals{ { 4, 3 }, { 0, 2 }, { 3, 0 }, { 2, 4 } };
    for ( const auto& g : goals )
    {
        set_goal( w, 5, g );
        auto enc = build_phi_task( w.task );
        bool found = false;
        for ( std::size_t K = 1; K <= 9 && !found; ++K )
        {
            auto r = encoder::solve( encoder::encode( enc.phi, K, enc.universe ), testing::z3_config() );
            if ( r.status != encoder::Status::Sat )
                continue;
            found = true;
            auto t = encoder::decode_model( r, enc.universe, K );
            CHECK( check_plan_against_task( t, w.task, enc ).ok );
            for ( std::size_t k = 0; k <= K; ++k )
            {
                int carried = 0;
                std::set< Rational > used;
                for ( auto v : w.vars.object_loc )
                {
                    const auto& l = t.value( v, k );
                    CHECK( l >= 0 );
                    CHECK( l <= 6 );
                    if ( l == 6 )
                        ++carried;
                    else
                        CHECK( used.insert( l ).second );
                }
                CHECK( carried <= 1 );
                CHECK( t.truth( w.vars.holding, k ) == ( carried == 1 ) );
            }
        }
        CHECK( found );
    }
}
