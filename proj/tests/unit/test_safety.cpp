#include "doctest.h"

#include "ritmp/safety/supervisor.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace ritmp::safety;

namespace
{

RobotState at( double x, double y, double v ) { return { x, y, 0, v, 0 }; }

SafetyParams fig_params( double eps )
{
    SafetyParams p;
    p.A = 1;
    p.B = 1;
    p.eps = eps;
    p.V_obs = 0.8;
    p.D_s = 0.3;
    return p;
}

} // namespace

TEST_CASE( "parameter validation" )
{
    CHECK_NOTHROW( SafetyParams{}.validate() );
    SafetyParams p;
    p.B = 0;
    CHECK_THROWS_AS( p.validate(), std::invalid_argument );
    p = {};
    p.eps = -0.1;
    CHECK_THROWS_AS( p.validate(), std::invalid_argument );
    p = {};
    p.D_s = 0;
    CHECK_THROWS_AS( p.validate(), std::invalid_argument );
}

TEST_CASE( "safe threshold: term-by-term evaluation" )
{
    auto p = fig_params( 0.1 );
    const double braking = 1.0 * 1.0 / 2.0;             // v^2 / 2B
    const double obstacle = 0.8 * ( 0.1 + 1.1 / 1.0 );  // V (eps + (v + A eps) / B)
    const double delay = 2.0 * ( 0.5 * 0.01 + 0.1 );    // (A/B + 1)(A eps^2 / 2 + eps v)
    CHECK( braking == doctest::Approx( 0.5 ) );
    CHECK( obstacle == doctest::Approx( 0.96 ) );
    CHECK( delay == doctest::Approx( 0.21 ) );
    CHECK( safe_threshold( 1.0, p ) == doctest::Approx( braking + obstacle + delay + 0.3 ).epsilon( 1e-12 ) );
    CHECK( safe_threshold( 1.0, p ) == doctest::Approx( 1.97 ).epsilon( 1e-12 ) );
}

TEST_CASE( "standing still without delay: safe iff beyond the margin" )
{
    auto p = fig_params( 0 );
    p.V_obs = 0.8;
    CHECK( safe_threshold( 0, p ) == doctest::Approx( 0.3 ) );
    CHECK( safe_condition( at( 0, 0, 0 ), { 0.31, 0.0 }, p ) );
    CHECK_FALSE( safe_condition( at( 0, 0, 0 ), { 0.3, 0.0 }, p ) );
    // Infinity norm: a diagonal point at (0.25, 0.25) is 0.25 away.
    CHECK_FALSE( safe_condition( at( 0, 0, 0 ), { 0.25, 0.25 }, p ) );
}

TEST_CASE( "phi_pf examples" )
{
    auto p = fig_params( 0.1 );
    CHECK( phi_pf( at( 0, 0, 0 ), { 0, 0 }, p ) );
    CHECK( phi_pf( at( 0, 0, 1 ), { 2.0, 0 }, p ) );
    CHECK_FALSE( phi_pf( at( 0, 0, 1 ), { 1.5, 0 }, p ) );
    // The two norms disagree off-axis: (1.2, 1.2) is 1.70 Euclidean, 1.2 in the infinity norm.
    CHECK( phi_pf( at( 0, 0, 1 ), { 1.2, 1.2 }, p, Norm::Euclidean ) );
    CHECK_FALSE( phi_pf( at( 0, 0, 1 ), { 1.2, 1.2 }, p, Norm::Infinity ) );
}

TEST_CASE( "supervisor modes" )
{
    auto p = fig_params( 0.1 );
    SUBCASE( "far obstacle passes the command through" )
    {
        auto d = supervise( at( 0, 0, 1 ), { 10, 0 }, { p.A, 0.3 }, p, {} );
        CHECK( d.command.a == p.A );
        CHECK( d.command.alpha == 0.3 );
        CHECK( d.state.mode == Mode::Drive );
    }
    SUBCASE( "commands are clamped to [-B, A]" )
    {
        auto d = supervise( at( 0, 0, 1 ), { 10, 0 }, { 5, 0 }, p, {} );
        CHECK( d.command.a == p.A );
        d = supervise( at( 0, 0, 1 ), { 10, 0 }, { -5, 0 }, p, {} );
        CHECK( d.command.a == -p.B );
    }
    SUBCASE( "just inside the threshold triggers override" )
    {
        double th = safe_threshold( 1, p );
        auto d = supervise( at( 0, 0, 1 ), { th - 1e-9, 0 }, { p.A, 1 }, p, {} );
        CHECK( d.state.mode == Mode::Override );
        CHECK( d.command.a == -p.B );
        CHECK( d.command.alpha == 0 );
        d = supervise( at( 0, 0, 1 ), { th + 1e-9, 0 }, { p.A, 1 }, p, {} );
        CHECK( d.state.mode == Mode::Drive );
    }
    SUBCASE( "override holds until stopped and calm for one period" )
    {
        SupervisorState s{ Mode::Override, 0 };
        // Moving and now safe: still braking.
        auto d = supervise( at( 0, 0, 0.2 ), { 10, 0 }, { p.A, 0 }, p, s );
        CHECK( d.state.mode == Mode::Override );
        d = supervise( at( 0, 0, 0 ), { 10, 0 }, { p.A, 0 }, p, d.state );
        CHECK( d.state.mode == Mode::Override );
        CHECK( d.state.calm_ticks == 1 );
        d = supervise( at( 0, 0, 0 ), { 10, 0 }, { p.A, 0 }, p, d.state );
        CHECK( d.state.mode == Mode::Drive );
        CHECK( d.command.a == p.A );
        // Stopped but unsafe: the calm count restarts.
        d = supervise( at( 0, 0, 0 ), { 0.1, 0 }, { p.A, 0 }, p, { Mode::Override, 1 } );
        CHECK( d.state.mode == Mode::Override );
        CHECK( d.state.calm_ticks == 0 );
    }
}

TEST_CASE( "braking from the unsafe boundary keeps the margin" )
{
    std::mt19937_64 rng{ 3 };
    std::uniform_real_distribution< double > U{ 0, 1 };
    for ( int trial = 0; trial < 200; ++trial )
    {
        SafetyParams p;
        p.A = 0.2 + 2 * U( rng );
        p.B = 0.2 + 2 * U( rng );
        p.eps = 0.2 * U( rng );
        p.V_obs = U( rng );
        p.D_s = 0.1 + U( rng );
        const double v = 1.5 * U( rng );
        const double start = safe_threshold( v, p ) + 1e-9;
        // Worst case: full acceleration through the delay, then full braking; obstacle closes at V_obs.
        const double v1 = v + p.A * p.eps;
        const double robot = v * p.eps + p.A * p.eps * p.eps / 2 + v1 * v1 / ( 2 * p.B );
        const double obstacle = p.V_obs * ( p.eps + v1 / p.B );
        CHECK( start - robot - obstacle > p.D_s );
        CHECK( start - robot - obstacle == doctest::Approx( p.D_s ).epsilon( 1e-9 ) );
    }
}

TEST_CASE( "property: monotone in v, eps, V_obs and D_s" )
{
    std::mt19937_64 rng{ 4 };
    std::uniform_real_distribution< double > U{ 0, 1 };
    for ( int trial = 0; trial < 2000; ++trial )
    {
        SafetyParams p;
        p.A = 0.1 + U( rng );
        p.B = 0.1 + U( rng );
        p.eps = 0.1 * U( rng );
        p.V_obs = U( rng );
        p.D_s = 0.1 + U( rng );
        const double v = U( rng );
        const Vec2 q{ 4 * U( rng ) - 2, 4 * U( rng ) - 2 };
        if ( !safe_condition( at( 0, 0, v ), q, p ) )
            continue;
        auto smaller = p;
        CHECK( safe_condition( at( 0, 0, v * U( rng ) ), q, p ) );
        smaller.eps *= U( rng );
        CHECK( safe_condition( at( 0, 0, v ), q, smaller ) );
        smaller = p;
        smaller.V_obs *= U( rng );
        CHECK( safe_condition( at( 0, 0, v ), q, smaller ) );
        smaller = p;
        smaller.D_s *= U( rng );
        CHECK( safe_condition( at( 0, 0, v ), q, smaller ) );
        // Threshold dominance over the infinity-norm invariant.
        CHECK( phi_pf( at( 0, 0, v ), q, p, Norm::Infinity ) );
    }
}

TEST_CASE( "infinity-closest point on a disc matches sampling" )
{
    std::mt19937_64 rng{ 5 };
    std::uniform_real_distribution< double > U{ -3, 3 };
    for ( int trial = 0; trial < 500; ++trial )
    {
        Disc d{ { U( rng ), U( rng ) }, 0.1 + std::abs( U( rng ) ) / 2 };
        Vec2 p{ U( rng ), U( rng ) };
        auto q = closest_point_inf( p, d );
        const double got = norm( { p.x - q.x, p.y - q.y }, Norm::Infinity );
        // q lies in the disc.
        CHECK( std::hypot( q.x - d.c.x, q.y - d.c.y ) <= d.r + 1e-9 );
        double best = std::hypot( p.x - d.c.x, p.y - d.c.y ) <= d.r ? 0.0 : 1e300;
        for ( int k = 0; k < 20000; ++k )
        {
            double t = 2 * 3.14159265358979323846 * k / 20000;
            Vec2 s{ d.c.x + d.r * std::cos( t ), d.c.y + d.r * std::sin( t ) };
            best = std::min( best, norm( { p.x - s.x, p.y - s.y }, Norm::Infinity ) );
        }
        CHECK( got <= best + 1e-9 );
        CHECK( got >= best - 1e-3 );
    }
    CHECK( sense( { 0, 0 }, {} ).x > 1e300 );
    auto s = sense( { 0, 0 }, { Disc{ { 5, 0 }, 1 }, Disc{ { 0, 3 }, 1 } } );
    CHECK( s.x == doctest::Approx( 0 ) );
    CHECK( s.y == doctest::Approx( 2 ) );
}

TEST_CASE( "one-dimensional head-on closing: phi_pf invariant under the supervisor" )
{
    // Robot on the x axis driving at the proposed full acceleration; the obstacle point walks toward it
    // at V_obs. Control is sampled every dt and held (delay dt <= eps).
    std::mt19937_64 rng{ 6 };
    std::uniform_real_distribution< double > U{ 0, 1 };
    for ( int episode = 0; episode < 300; ++episode )
    {
        SafetyParams p = fig_params( 0.02 + 0.08 * U( rng ) );
        const double dt = p.eps / 2;
        double x = 0, v = U( rng ), ox = 3 + 3 * U( rng );
        SupervisorState st;
        REQUIRE( phi_pf( at( x, 0, v ), { ox, 0 }, p, Norm::Infinity ) );
        for ( int tick = 0; tick < 2000; ++tick )
        {
            auto d = supervise( at( x, 0, v ), { ox, 0 }, { p.A, 0 }, p, st );
            st = d.state;
            const double a = d.command.a;
            // Exact integration with the stop at v = 0.
            double tstop = a < 0 ? v / -a : dt;
            double h = std::min( dt, tstop );
            x += v * h + a * h * h / 2;
            v = std::max( 0.0, v + a * h );
            ox -= p.V_obs * dt * U( rng );
            CHECK( phi_pf( at( x, 0, v ), { ox, 0 }, p, Norm::Infinity ) );
            if ( std::abs( ox - x ) <= p.D_s )
                CHECK( v == 0 );
        }
    }
}

TEST_CASE( "uses_proposal agrees with supervise" )
{
    std::mt19937_64 rng{ 7 };
    std::uniform_real_distribution< double > U{ 0, 1 };
    auto p = fig_params( 0.05 );
    for ( int trial = 0; trial < 5000; ++trial )
    {
        const RobotState r = at( 0, 0, U( rng ) < 0.3 ? 0.0 : U( rng ) );
        const Vec2 q{ 4 * U( rng ) - 2, 4 * U( rng ) - 2 };
        const SupervisorState st{ U( rng ) < 0.5 ? Mode::Drive : Mode::Override, static_cast< int >( rng() % 3 ) };
        const Control a{ 0.5, 0.25 }, b{ -0.25, -1 };
        const auto da = supervise( r, q, a, p, st ), db = supervise( r, q, b, p, st );
        if ( uses_proposal( r, q, p, st ) )
        {
            CHECK( da.command.a == a.a );
            CHECK( db.command.alpha == b.alpha );
        }
        else
        {
            CHECK( da.command.a == -p.B );
            CHECK( db.command.a == -p.B );
            CHECK( da.command.alpha == 0 );
        }
    }
}
