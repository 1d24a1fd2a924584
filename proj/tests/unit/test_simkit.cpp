#include "doctest.h"

#include "ritmp/simkit/dynamics.hpp"
#include "ritmp/simkit/episode.hpp"
#include "support/solvers.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

using namespace ritmp;
using namespace ritmp::simkit;

namespace
{

constexpr double pi = 3.14159265358979323846;

double state_error( const RobotState& a, const RobotState& b )
{
    return std::max( { std::abs( a.x - b.x ), std::abs( a.y - b.y ), std::abs( wrap_angle( a.theta - b.theta ) ),
                       std::abs( a.v - b.v ), std::abs( a.omega - b.omega ) } );
}

RobotState integrate( RobotState s, Control u, double T, double dt )
{
    const int n = static_cast< int >( std::lround( T / dt ) );
    for ( int i = 0; i < n; ++i )
        s = step_dynamics( s, u, dt );
    return s;
}

LoopParams loop_params()
{
    LoopParams p;
    p.safety.eps = 0.05;
    return p;
}

// Convex pentagon around the origin.
geometry::HPolytope pentagon()
{
    return geometry::from_vertices( { { -3, -2 }, { 3, -2 }, { 4, 1 }, { 0, 3 }, { -4, 1 } } );
}

} // namespace

TEST_CASE( "dynamics: straight line is exact" )
{
    RobotState s{ 0, 0, 0, 1, 0 };
    auto t = step_dynamics( s, { 0, 0 }, 0.1 );
    CHECK( t.x == 0.1 );
    CHECK( t.y == 0 );
    CHECK( t.theta == 0 );
    CHECK( t.v == 1 );
    CHECK( t.omega == 0 );
}

TEST_CASE( "dynamics: standing still rotates in place" )
{
    RobotState s{ 1, 2, 0.3, 0, 0.7 };
    auto t = integrate( s, { 0, 0.4 }, 1.0, 0.01 );
    CHECK( t.x == 1 );
    CHECK( t.y == 2 );
    CHECK( t.theta == doctest::Approx( 0.3 + 0.7 + 0.2 ).epsilon( 1e-12 ) );
    CHECK( t.omega == doctest::Approx( 1.1 ) );
}

TEST_CASE( "dynamics: fourth-order convergence" )
{
    const RobotState s{ 0.2, -0.1, 0.4, 0.5, 0.3 };
    const Control u{ 0.3, 0.5 };
    const double T = 2.0;
    for ( double dt : { 0.2, 0.1, 0.05 } )
    {
        auto ref = integrate( s, u, T, dt / 8 );
        double e1 = state_error( integrate( s, u, T, dt ), ref );
        double e2 = state_error( integrate( s, u, T, dt / 2 ), ref );
        CHECK( e1 / e2 >= 12 );
        CHECK( e1 / e2 <= 20 );
    }
}

TEST_CASE( "dynamics: braking stops exactly at zero" )
{
    RobotState s{ 0, 0, 0, 0.5, 0 };
    double x = 0;
    for ( int i = 0; i < 100; ++i )
    {
        s = step_dynamics( s, { -1, 0 }, 0.03 );
        CHECK( s.v >= 0 );
        x = s.x;
    }
    CHECK( s.v == 0 );
    CHECK( x == doctest::Approx( 0.125 ).epsilon( 1e-12 ) );
    CHECK_THROWS_AS( step_dynamics( s, {}, 0 ), std::invalid_argument );
}

TEST_CASE( "dynamics: heading stays in (-pi, pi]" )
{
    RobotState s{ 0, 0, 3.1, 0.5, 1.5 };
    for ( int i = 0; i < 2000; ++i )
    {
        s = step_dynamics( s, { 0, 0 }, 0.01 );
        CHECK( s.theta > -pi );
        CHECK( s.theta <= pi );
    }
    CHECK( wrap_angle( pi ) == pi );
    CHECK( wrap_angle( -pi ) == pi );
}

TEST_CASE( "kernels: SIMD variants match the scalar reference bit for bit" )
{
    std::mt19937_64 rng{ 9 };
    std::uniform_real_distribution< double > U{ -10, 10 };
    INFO( "detected: " << simd_level_name( detected_simd_level() ) );
    for ( int trial = 0; trial < 300; ++trial )
    {
        const std::size_t n = static_cast< std::size_t >( trial % 37 ), m = static_cast< std::size_t >( trial % 9 );
        std::vector< double > xs( n ), ys( n );
        for ( std::size_t i = 0; i < n; ++i )
        {
            xs[ i ] = U( rng );
            ys[ i ] = U( rng );
        }
        FacetRows f;
        for ( std::size_t j = 0; j < m; ++j )
        {
            double a = U( rng );
            f.hx.push_back( std::cos( a ) );
            f.hy.push_back( std::sin( a ) );
            f.c.push_back( U( rng ) );
        }
        std::vector< double > s1( n ), s2( n ), s3( n ), d1( n ), d2( n ), d3( n );
        min_slack_scalar( xs.data(), ys.data(), n, f, s1.data() );
        min_slack_avx2( xs.data(), ys.data(), n, f, s2.data() );
        min_slack( xs.data(), ys.data(), n, f, s3.data() );
        const double px = U( rng ), py = U( rng );
        dist2_scalar( xs.data(), ys.data(), n, px, py, d1.data() );
        dist2_avx2( xs.data(), ys.data(), n, px, py, d2.data() );
        dist2( xs.data(), ys.data(), n, px, py, d3.data() );
        if ( n == 0 )
            continue;
        CHECK( std::memcmp( s1.data(), s2.data(), n * sizeof( double ) ) == 0 );
        CHECK( std::memcmp( s1.data(), s3.data(), n * sizeof( double ) ) == 0 );
        CHECK( std::memcmp( d1.data(), d2.data(), n * sizeof( double ) ) == 0 );
        CHECK( std::memcmp( d1.data(), d3.data(), n * sizeof( double ) ) == 0 );
    }
}

TEST_CASE( "dwa: target straight ahead" )
{
    auto p = loop_params();
    auto rows = corridor_rows( geometry::box( -1, -1, 10, 1 ) );
    World w;
    w.robot = { 0, 0, 0.2, 0, 0 };
    Target t{ 8, 0, 0 };
    auto u = dwa_plan( w.robot, t, rows, std::nullopt, p.dwa );
    CHECK( u.a > 0 );
    double err0 = std::abs( wrap_angle( std::atan2( -w.robot.y, 8 - w.robot.x ) - w.robot.theta ) );
    for ( int i = 0; i < 200; ++i )
        tick( w, t, rows, p, 1, "go", nullptr );
    double err1 = std::abs( wrap_angle( std::atan2( -w.robot.y, 8 - w.robot.x ) - w.robot.theta ) );
    CHECK( err1 < err0 );
    CHECK( w.robot.v > 0.5 );
}

TEST_CASE( "dwa: target behind stops, then turns in place" )
{
    auto p = loop_params();
    auto rows = corridor_rows( geometry::box( -5, -5, 5, 5 ) );
    World w;
    w.robot = { 0, 0, 0, 0.6, 0 };
    Target t{ -3, 0, pi };
    bool stopped = false;
    double x_stop = 0;
    for ( int i = 0; i < 600; ++i )
    {
        const double err = std::abs( wrap_angle( std::atan2( -w.robot.y, -3 - w.robot.x ) - w.robot.theta ) );
        if ( !stopped && w.robot.v == 0 )
        {
            stopped = true;
            x_stop = w.robot.x;
        }
        if ( stopped && err > pi / 2 )
        {
            // Facing away from the target: only rotation, no translation.
            CHECK( w.robot.v < 0.02 );
            CHECK( std::abs( w.robot.x - x_stop ) < 0.01 );
        }
        tick( w, t, rows, p, 1, "go", nullptr );
    }
    CHECK( stopped );
    CHECK( w.robot.x < x_stop );
}

TEST_CASE( "dwa: convergence from 100 starts inside a convex corridor" )
{
    auto p = loop_params();
    const auto poly = pentagon();
    const auto rows = corridor_rows( poly );
    std::mt19937_64 rng{ 21 };
    std::uniform_real_distribution< double > X{ -4, 4 }, Y{ -2, 3 }, TH{ -pi, pi };
    auto inside = [ & ]( double x, double y ) { return slack( rows, x, y ) > 0.05; };
    double worst_time = 0;
    int runs = 0;
    while ( runs < 100 )
    {
        const double x0 = X( rng ), y0 = Y( rng ), x1 = X( rng ), y1 = Y( rng );
        const double th0 = TH( rng ), th1 = TH( rng );
        if ( !inside( x0, y0 ) || !inside( x1, y1 ) )
            continue;
        ++runs;
        World w;
        w.robot = { x0, y0, th0, 0, 0 };
        TraceRecord tr;
        DriveLimits lim;
        lim.step_timeout = 60;
        auto st = drive_to( w, { x1, y1, th1 }, rows, p, 1, "go", lim, &tr );
        CHECK( st == DriveStatus::Arrived );
        worst_time = std::max( worst_time, w.t );
        double min_slack_seen = 1e9;
        for ( const auto& r : tr.rows )
            min_slack_seen = std::min( min_slack_seen, slack( rows, r.s.x, r.s.y ) );
        CHECK( min_slack_seen >= -1e-6 );
        CHECK( nonholonomic_residual( tr ) < 1e-3 );
    }
    MESSAGE( "slowest arrival " << worst_time << " s" );
    CHECK( worst_time < 30 );
}

TEST_CASE( "dwa: corridor edge targets and starts slightly outside" )
{
    auto p = loop_params();
    const auto rows = corridor_rows( geometry::box( 0, 0, 4, 1 ) );
    // Target on the top-right corner, start a little outside the left edge.
    World w;
    w.robot = { -0.03, 0.5, pi, 0, 0 };
    auto st = drive_to( w, { 4, 1, 0 }, rows, p, 1, "go", {}, nullptr );
    CHECK( st == DriveStatus::Arrived );
}

TEST_CASE( "dwa: no admissible sample brakes fully" )
{
    auto p = loop_params();
    const auto rows = corridor_rows( geometry::box( 0, 0, 1, 1 ) );
    // Moving fast toward a wall it cannot stop before.
    RobotState s{ 0.9, 0.5, 0, 1.0, 0 };
    auto u = dwa_plan( s, { 0.5, 0.5, 0 }, rows, std::nullopt, p.dwa );
    CHECK( u.a == -p.dwa.B );
}

TEST_CASE( "obstacle models respect the speed bound" )
{
    const double dt = 0.01;
    RobotState robot{ 0, 0, 0, 0, 0 };
    ObstacleModel loop{ "loop", ObstaclePolicy::WaypointLoop, { 0, 2 }, 0.2, 0.8, { { 2, 2 }, { 2, 4 }, { 0, 2 } }, {} };
    ObstacleModel head{ "head", ObstaclePolicy::HeadOn, { 3, 0 }, 0.25, 0.8, {}, {} };
    ObstacleModel script{ "s", ObstaclePolicy::Scripted, { 0, -2 }, 0.2, 0.8, {}, { { 0, 0, -2 }, { 1, 5, -2 } } };
    ObstacleModel still{ "still", ObstaclePolicy::Static, { 1, 1 }, 0.2, 0.8, {}, {} };
    std::vector< ObstacleModel > all{ loop, head, script, still };
    for ( int i = 0; i < 2000; ++i )
        for ( auto& o : all )
        {
            Vec2 before = o.position;
            step_obstacle( o, robot, i * dt, dt );
            CHECK( std::hypot( o.position.x - before.x, o.position.y - before.y ) <= 0.8 * dt + 1e-12 );
        }
    CHECK( all[ 0 ].next_waypoint > 0 );
    // Head-on parks touching the robot center.
    CHECK( std::hypot( all[ 1 ].position.x, all[ 1 ].position.y ) == doctest::Approx( 0.25 ) );
    CHECK( all[ 2 ].position.x == doctest::Approx( 5 ) );
    CHECK( all[ 3 ].position.x == 1 );
    CHECK( script_position( script.script, 0.5 ).x == doctest::Approx( 2.5 ) );
    CHECK( parse_obstacle_policy( "head-on" ) == ObstaclePolicy::HeadOn );
    CHECK_THROWS_AS( parse_obstacle_policy( "teleport" ), std::invalid_argument );
}

TEST_CASE( "nonholonomic residual" )
{
    TraceRecord line;
    RobotState s{ 0, 0, 0, 0.5, 0 };
    for ( int i = 0; i < 200; ++i )
    {
        line.rows.push_back( { i * 0.01, s, {}, safety::Mode::Drive, 1, "go", {} } );
        s = step_dynamics( s, { 0.2, 0 }, 0.01 );
    }
    CHECK( nonholonomic_residual( line ) == 0 );

    auto arc = []( double dt, double a ) {
        TraceRecord tr;
        tr.dt = dt;
        RobotState s{ 0, 0, 0.3, 1, 1.5 };
        const int n = static_cast< int >( std::lround( 4 / dt ) );
        for ( int i = 0; i < n; ++i )
        {
            tr.rows.push_back( { i * dt, s, {}, safety::Mode::Drive, 1, "go", {} } );
            s = step_dynamics( s, { a, 0 }, dt );
        }
        return nonholonomic_residual( tr );
    };
    // On a circle the chord between rows i-1 and i+1 is parallel to the tangent at row i, so only the
    // integrator error remains. With changing speed the midpoint shifts and the residual is O(dt^2).
    const double r1 = arc( 0.01, 0 ), r2 = arc( 0.005, 0 );
    CHECK( r1 < 1e-8 );
    CHECK( r2 < 1e-8 );
    const double s1 = arc( 0.01, 0.5 ), s2 = arc( 0.005, 0.5 );
    CHECK( s1 < 1e-3 );
    CHECK( s1 / s2 == doctest::Approx( 4 ).epsilon( 0.05 ) );
}

TEST_CASE( "trace CSV round trip" )
{
    TraceRecord tr;
    tr.obstacle_names = { "R3" };
    tr.rows.push_back( { 0, { 1, 2, 0.5, 0.25, -0.1 }, { 1, -2 }, safety::Mode::Override, 3, "move(W1)", { { 4, 5 } } } );
    tr.rows.push_back( { 0.01, { 1.5, 2, 0.5, 0.25, -0.1 }, { 0, 0 }, safety::Mode::Drive, 3, "move(W1)", { { 4, 5.5 } } } );
    std::stringstream ss;
    write_csv( tr, ss );
    const std::string text = ss.str();
    CHECK( text.rfind( "t,px,py,theta,v,omega,a,alpha,mode,step,action,obst1x,obst1y\n", 0 ) == 0 );
    auto back = read_csv( ss );
    REQUIRE( back.rows.size() == 2 );
    CHECK( back.rows[ 0 ].mode == safety::Mode::Override );
    CHECK( back.rows[ 0 ].action == "move(W1)" );
    CHECK( back.rows[ 1 ].obstacles[ 0 ].y == 5.5 );
    std::stringstream again;
    write_csv( back, again );
    CHECK( again.str() == text );
    std::stringstream bad{ "t,px\n" };
    CHECK_THROWS_AS( read_csv( bad ), std::runtime_error );
    std::stringstream worse{ "t,px,py,theta,v,omega,a,alpha,mode,step,action\n0,1,2,3,4,5,6,7,fly,1,x\n" };
    CHECK_THROWS_WITH_AS( read_csv( worse ), "trace line 2: malformed field", std::runtime_error );
}

TEST_CASE( "loop parameter validation" )
{
    auto p = loop_params();
    CHECK_NOTHROW( p.validate() );
    p.safety.eps = 0.015;
    CHECK_THROWS_AS( p.validate(), std::invalid_argument );
    p = loop_params();
    p.dwa.B = 2;
    CHECK_THROWS_AS( p.validate(), std::invalid_argument );
}

TEST_CASE( "head-on obstacles under DWA and the supervisor: no moving collision" )
{
    auto p = loop_params();
    const auto rows = corridor_rows( geometry::box( -1, -2, 12, 2 ) );
    std::mt19937_64 rng{ 31 };
    std::uniform_real_distribution< double > U{ 0, 1 };
    std::size_t overrides = 0;
    for ( int episode = 0; episode < 40; ++episode )
    {
        World w;
        w.robot = { 0, 0, 0, 0, 0 };
        ObstacleModel o{ "b", ObstaclePolicy::HeadOn, { 6 + 4 * U( rng ), 3 * U( rng ) - 1.5 }, 0.2 + 0.2 * U( rng ),
                         0.8 * U( rng ), {}, {} };
        w.obstacles = { o };
        TraceRecord tr;
        tr.obstacle_names = { "b" };
        for ( int i = 0; i < 1500; ++i )
        {
            tick( w, { 11, 0, 0 }, rows, p, 1, "go", &tr );
            auto q = sensed_point( w, p.sensor_range );
            if ( q )
                CHECK( safety::phi_pf( w.robot, *q, p.safety, safety::Norm::Infinity ) );
        }
        CHECK( moving_collisions( tr, { o.radius }, p.safety.D_s ) == 0 );
        overrides += w.override_ticks;
    }
    CHECK( overrides > 0 );
}

TEST_CASE( "episode on a toy mission" )
{
    using namespace ritmp::missiongame;
    MissionConfig c;
    c.locations = { { "A", 1, 1, {} }, { "B", 5, 1, {} }, { "H", 3, 3, {} } };
    c.objects = { "o1" };
    c.object_slots = { 0, 1 };
    c.robot_slots = { 2 };
    EnvironmentModel env;
    env.rules.push_back( { "shuffle", 0, 1, 0 } );
    SynthesisOptions opt;
    opt.solver = testing::z3_config();
    opt.K_max = 8;
    geometry::Workspace open{ geometry::box( 0, 0, 6, 4 ), {} };
    auto g = synth_mission_graph( c, env, open, {}, opt );
    WinningCondition w;
    w.init = Predicate::all( { Predicate::object_in( 0, { 0 } ), Predicate::turn( EnvTurn ) } );
    w.kind = ObjectiveKind::SafetyGeneralizedBuchi;
    w.safe = Predicate::truth( true );
    w.goals = { Predicate::object_in( 0, { 1 } ) };
    auto s = solve_game( g, w );
    REQUIRE( s );

    EpisodeConfig cfg;
    cfg.loop = loop_params();
    auto r = run_episode( g, w, *s, cfg );
    INFO( r.detail );
    CHECK( r.status == EpisodeStatus::Completed );
    CHECK( r.verdict == Verdict::Satisfied );
    CHECK( r.override_ticks == 0 );
    REQUIRE( r.events.size() == 2 );
    CHECK( r.events[ 0 ].action == "pick(o1)" );
    CHECK( r.events[ 0 ].location == "A" );
    CHECK( r.events[ 1 ].action == "drop(o1, B)" );
    CHECK( r.events[ 1 ].location == "B" );
    CHECK( nonholonomic_residual( r.trace ) < 1e-3 );
    for ( std::size_t i = 1; i < r.trace.rows.size(); ++i )
        CHECK( r.trace.rows[ i ].t > r.trace.rows[ i - 1 ].t );

    SUBCASE( "deterministic" )
    {
        auto again = run_episode( g, w, *s, cfg );
        std::stringstream a, b;
        write_csv( r.trace, a );
        write_csv( again.trace, b );
        CHECK( a.str() == b.str() );
    }
    SUBCASE( "scripted environment moves replay" )
    {
        // After the fetch, the environment shuffles the object back once; the strategy fetches again.
        cfg.env_script = { "idle", "shuffle" };
        auto again = run_episode( g, w, *s, cfg );
        CHECK( again.verdict == Verdict::Satisfied );
        CHECK( again.events.size() == 4 );
    }
    SUBCASE( "unknown environment move" )
    {
        cfg.env_script = { "teleport" };
        auto again = run_episode( g, w, *s, cfg );
        CHECK( again.verdict == Verdict::Undetermined );
    }
}
