#include "ritmp/simkit/dwa.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ritmp::simkit
{

namespace
{

constexpr double pi = 3.14159265358979323846;
constexpr std::size_t max_points = 128;
// Rollouts keep this distance from the facets so integration error cannot push the robot across one.
constexpr double margin = 1e-3;

struct Rollout
{
    std::array< double, max_points > x{};
    std::array< double, max_points > y{};
    std::array< double, max_points > th{};
    std::size_t n = 0;

    void push( double px, double py, double pt )
    {
        x[ n ] = px;
        y[ n ] = py;
        th[ n ] = pt;
        ++n;
    }
};

// Midpoint-heading arc step.
void advance( double& x, double& y, double& th, double v, double w, double h )
{
    const double mid = th + w * h / 2;
    x += v * h * std::cos( mid );
    y += v * h * std::sin( mid );
    th += w * h;
}

Rollout braking_rollout( const RobotState& s, double v, double w, const DwaParams& p )
{
    Rollout r;
    double x = s.x, y = s.y, th = s.theta;
    r.push( x, y, th );
    // The sample is reached after one period, then both rates decay at full deceleration.
    advance( x, y, th, ( s.v + v ) / 2, ( s.omega + w ) / 2, p.dt );
    r.push( x, y, th );
    const double h = p.rollout_step;
    while ( v > 0 && r.n < max_points )
    {
        const double step = std::min( h, v / p.B );
        const double v1 = v - p.B * step;
        const double dw = std::min( std::abs( w ), p.alpha_max * step );
        const double w1 = w > 0 ? w - dw : w + dw;
        advance( x, y, th, ( v + v1 ) / 2, ( w + w1 ) / 2, step );
        r.push( x, y, th );
        v = v1;
        w = w1;
    }
    return r;
}

// Constant-rate arc, cut once the target is within tolerance. The step headings advance by a fixed
// rotation, so one sincos pair serves the whole arc.
Rollout cruise_rollout( const RobotState& s, double v, double w, const Target& t, const DwaParams& p )
{
    Rollout r;
    const double h = p.rollout_step;
    const double stop2 = p.pos_tol * p.pos_tol / 4;
    double x = s.x, y = s.y;
    double c = std::cos( s.theta + w * h / 2 ), sn = std::sin( s.theta + w * h / 2 );
    const double rc = std::cos( w * h ), rs = std::sin( w * h );
    const int steps = static_cast< int >( std::lround( p.horizon / h ) );
    for ( int i = 0; i < steps && r.n < max_points; ++i )
    {
        x += v * h * c;
        y += v * h * sn;
        r.push( x, y, s.theta + w * h * ( i + 1 ) );
        const double c1 = c * rc - sn * rs;
        sn = sn * rc + c * rs;
        c = c1;
        if ( ( t.x - x ) * ( t.x - x ) + ( t.y - y ) * ( t.y - y ) < stop2 )
            break;
    }
    return r;
}

double clamp_sym( double x, double m ) { return std::clamp( x, -m, m ); }

} // namespace

void DwaParams::validate() const
{
    if ( !( A > 0 ) || !( B > 0 ) || !( alpha_max > 0 ) || !( v_max > 0 ) || !( omega_max > 0 ) )
        throw std::invalid_argument( "DWA limits must be positive" );
    if ( !( dt > 0 ) || !( horizon > 0 ) || !( rollout_step > 0 ) || horizon / rollout_step > max_points - 2 )
        throw std::invalid_argument( "DWA periods must be positive and the horizon at most 126 steps" );
    if ( v_samples < 1 || omega_samples < 1 )
        throw std::invalid_argument( "DWA needs at least one sample per axis" );
}

FacetRows corridor_rows( const geometry::HPolytope& poly )
{
    FacetRows f;
    for ( const auto& r : poly.facets() )
    {
        const double hx = to_double( r.hx ), hy = to_double( r.hy ), c = to_double( r.c );
        const double n = std::hypot( hx, hy );
        if ( n == 0 )
        {
            if ( c < 0 )
            {
                f.hx.push_back( 0 );
                f.hy.push_back( 0 );
                f.c.push_back( -1 );
            }
            continue;
        }
        f.hx.push_back( hx / n );
        f.hy.push_back( hy / n );
        f.c.push_back( c / n );
    }
    return f;
}

double slack( const FacetRows& f, double x, double y )
{
    double out;
    min_slack_scalar( &x, &y, 1, f, &out );
    return out;
}

bool arrived( const RobotState& s, const Target& t, const DwaParams& p )
{
    return s.v == 0 && std::hypot( t.x - s.x, t.y - s.y ) <= p.pos_tol &&
           std::abs( wrap_angle( t.theta - s.theta ) ) <= p.heading_tol;
}

Control dwa_plan( const RobotState& s, const Target& t, const FacetRows& corridor, std::optional< Vec2 > obstacle,
                  const DwaParams& p )
{
    const double d0 = std::hypot( t.x - s.x, t.y - s.y );

    // Final approach: stop, then turn in place onto the target heading.
    if ( d0 < p.pos_tol * 0.4 || ( d0 < p.pos_tol && s.v < 0.05 ) )
    {
        const double a = s.v > 0 ? -std::min( p.B, s.v / p.dt ) : 0.0;
        const double err = wrap_angle( t.theta - s.theta );
        double want = 0;
        if ( s.v == 0 && std::abs( err ) > p.heading_tol / 4 )
        {
            const double mag = std::min( { p.omega_max, std::sqrt( 2 * p.alpha_max * std::abs( err ) ) * 0.8,
                                           3 * std::abs( err ) } );
            want = err > 0 ? mag : -mag;
        }
        return { a, clamp_sym( ( want - s.omega ) / p.dt, p.alpha_max ) };
    }

    // Aim a little inside the corridor so a target on a facet does not pin the robot against it.
    Target aim = t;
    for ( int pass = 0; pass < 4; ++pass )
        for ( std::size_t j = 0; j < corridor.size(); ++j )
        {
            const double r = corridor.c[ j ] - ( corridor.hx[ j ] * aim.x + corridor.hy[ j ] * aim.y );
            if ( r < 2 * margin )
            {
                aim.x -= ( 2 * margin - r ) * corridor.hx[ j ];
                aim.y -= ( 2 * margin - r ) * corridor.hy[ j ];
            }
        }
    const double a0 = std::hypot( aim.x - s.x, aim.y - s.y );
    const double v_lo = std::max( 0.0, s.v - p.B * p.dt );
    const double v_cap = std::sqrt( 2 * p.B * std::max( d0 - p.pos_tol * 0.2, 0.0 ) );
    double v_hi = std::max( v_lo, std::min( { p.v_max, s.v + p.A * p.dt, v_cap } ) );
    // Target behind: slow down and turn in place instead of arcing around.
    const double herr_now = wrap_angle( std::atan2( aim.y - s.y, aim.x - s.x ) - s.theta );
    if ( std::abs( herr_now ) > pi / 2 )
        v_hi = v_lo;
    double w_lo = std::max( -p.omega_max, s.omega - p.alpha_max * p.dt );
    double w_hi = std::min( p.omega_max, s.omega + p.alpha_max * p.dt );
    if ( w_lo > w_hi )
        w_lo = w_hi = clamp_sym( s.omega, p.omega_max );

    const double slack_now = slack( corridor, s.x, s.y );
    const double floor = std::min( slack_now, margin ) - 1e-12;
    double obst_now2 = std::numeric_limits< double >::infinity();
    if ( obstacle )
        obst_now2 = ( s.x - obstacle->x ) * ( s.x - obstacle->x ) + ( s.y - obstacle->y ) * ( s.y - obstacle->y );
    const double keep2 = std::min( p.D_s * p.D_s, obst_now2 );

    std::array< double, max_points > buf{};
    double best_score = -std::numeric_limits< double >::infinity();
    double best_v = 0, best_w = 0;
    bool found = false;
    // Grid plus the rate that would line the heading up with the aim point over the horizon.
    const double w_align = std::clamp( herr_now / p.horizon, w_lo, w_hi );
    for ( int i = 0; i < p.v_samples; ++i )
    {
        const double v = p.v_samples == 1 ? v_hi : v_lo + ( v_hi - v_lo ) * i / ( p.v_samples - 1 );
        for ( int j = 0; j <= p.omega_samples; ++j )
        {
            const double w = j == p.omega_samples ? w_align
                             : p.omega_samples == 1
                                 ? ( w_lo + w_hi ) / 2
                                 : w_lo + ( w_hi - w_lo ) * j / ( p.omega_samples - 1 );
            const Rollout brake = braking_rollout( s, v, w, p );
            min_slack( brake.x.data(), brake.y.data(), brake.n, corridor, buf.data() );
            if ( *std::min_element( buf.begin(), buf.begin() + brake.n ) < floor )
                continue;
            if ( obstacle )
            {
                dist2( brake.x.data() + 1, brake.y.data() + 1, brake.n - 1, obstacle->x, obstacle->y, buf.data() );
                if ( *std::min_element( buf.begin(), buf.begin() + ( brake.n - 1 ) ) < keep2 )
                    continue;
            }

            const Rollout cruise = cruise_rollout( s, v, w, aim, p );
            const std::size_t n = cruise.n;
            const double ex = cruise.x[ n - 1 ], ey = cruise.y[ n - 1 ];
            double closest2 = a0 * a0;
            for ( std::size_t k = 0; k < n; ++k )
                closest2 = std::min( closest2, ( aim.x - cruise.x[ k ] ) * ( aim.x - cruise.x[ k ] ) +
                                                   ( aim.y - cruise.y[ k ] ) * ( aim.y - cruise.y[ k ] ) );
            const double closest = std::min( a0, std::sqrt( closest2 ) );
            const double progress = ( a0 - closest ) / ( p.v_max * p.horizon );
            const double dend = std::hypot( aim.x - ex, aim.y - ey );
            const double herr = dend < p.pos_tol ? 0.0
                                                 : std::abs( wrap_angle( std::atan2( aim.y - ey, aim.x - ex ) -
                                                                         cruise.th[ n - 1 ] ) );
            min_slack( cruise.x.data(), cruise.y.data(), n, corridor, buf.data() );
            const double clear = std::min( *std::min_element( buf.begin(), buf.begin() + n ), 0.5 ) / 0.5;
            double obst = 1;
            if ( obstacle )
            {
                dist2( cruise.x.data(), cruise.y.data(), n, obstacle->x, obstacle->y, buf.data() );
                const double dmin = std::sqrt( *std::min_element( buf.begin(), buf.begin() + n ) );
                obst = std::clamp( dmin - p.D_s, 0.0, 1.0 );
            }
            const double score = p.w_progress * progress + p.w_heading * ( 1 - herr / pi ) +
                                 p.w_clearance * clear + p.w_speed * v / p.v_max + p.w_obstacle * obst;
            if ( score > best_score )
            {
                best_score = score;
                best_v = v;
                best_w = w;
                found = true;
            }
        }
    }
    if ( !found )
        return { -p.B, clamp_sym( -s.omega / p.dt, p.alpha_max ) };
    return { std::clamp( ( best_v - s.v ) / p.dt, -p.B, p.A ), clamp_sym( ( best_w - s.omega ) / p.dt, p.alpha_max ) };
}

Control dwa_plan( const RobotState& s, const Target& target, const geometry::HPolytope& corridor,
                  std::optional< Vec2 > obstacle, const DwaParams& p )
{
    return dwa_plan( s, target, corridor_rows( corridor ), obstacle, p );
}

} // namespace ritmp::simkit
