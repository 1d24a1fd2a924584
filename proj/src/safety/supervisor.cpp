#include "ritmp/safety/supervisor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ritmp::safety
{

void SafetyParams::validate() const
{
    if ( !( A > 0 ) || !( B > 0 ) )
        throw std::invalid_argument( "safety parameters need A > 0 and B > 0" );
    if ( !( eps >= 0 ) || !( V_obs >= 0 ) )
        throw std::invalid_argument( "safety parameters need eps >= 0 and V_obs >= 0" );
    if ( !( D_s > 0 ) )
        throw std::invalid_argument( "safety parameters need D_s > 0" );
}

const char* mode_name( Mode m ) { return m == Mode::Drive ? "drive" : "override"; }

double norm( Vec2 d, Norm n )
{
    return n == Norm::Infinity ? std::max( std::abs( d.x ), std::abs( d.y ) ) : std::hypot( d.x, d.y );
}

double safe_threshold( double v, const SafetyParams& p )
{
    const double e = p.eps;
    return v * v / ( 2 * p.B ) + p.V_obs * ( e + ( v + p.A * e ) / p.B ) + ( p.A / p.B + 1 ) * ( p.A / 2 * e * e + e * v ) +
           p.D_s;
}

namespace
{

Vec2 diff( const RobotState& r, Vec2 q ) { return { r.x - q.x, r.y - q.y }; }

} // namespace

bool safe_condition( const RobotState& robot, Vec2 obstacle_point, const SafetyParams& p )
{
    return norm( diff( robot, obstacle_point ), Norm::Infinity ) > safe_threshold( robot.v, p );
}

bool phi_pf( const RobotState& robot, Vec2 obstacle_point, const SafetyParams& p, Norm n )
{
    const double v = robot.v;
    return v == 0 || norm( diff( robot, obstacle_point ), n ) > v * v / ( 2 * p.B ) + p.V_obs * v / p.B + p.D_s;
}

bool uses_proposal( const RobotState& robot, Vec2 obstacle_point, const SafetyParams& p, SupervisorState state )
{
    const bool safe = safe_condition( robot, obstacle_point, p );
    if ( state.mode == Mode::Drive )
        return safe;
    return robot.v <= 0 && safe && state.calm_ticks + 1 >= 2;
}

Decision supervise( const RobotState& robot, Vec2 obstacle_point, Control proposed, const SafetyParams& p,
                    SupervisorState state )
{
    Decision d;
    d.safe = safe_condition( robot, obstacle_point, p );
    const Control brake{ -p.B, 0 };
    const Control drive{ std::clamp( proposed.a, -p.B, p.A ), proposed.alpha };
    if ( state.mode == Mode::Drive )
    {
        d.command = d.safe ? drive : brake;
        d.state = { d.safe ? Mode::Drive : Mode::Override, 0 };
        return d;
    }
    if ( robot.v <= 0 && d.safe )
    {
        if ( state.calm_ticks + 1 >= 2 )
        {
            d.command = drive;
            d.state = { Mode::Drive, 0 };
            return d;
        }
        d.command = brake;
        d.state = { Mode::Override, state.calm_ticks + 1 };
        return d;
    }
    d.command = brake;
    d.state = { Mode::Override, 0 };
    return d;
}

Vec2 closest_point_inf( Vec2 p, const Disc& d )
{
    const double dx = p.x - d.c.x, dy = p.y - d.c.y;
    if ( dx * dx + dy * dy <= d.r * d.r )
        return p;
    const double sx = dx < 0 ? -1 : 1, sy = dy < 0 ? -1 : 1;
    const double ux = std::abs( dx ), uy = std::abs( dy );
    // The smallest square around p touching the disc meets it either on a flat side or at a corner.
    if ( ux - d.r >= uy )
        return { d.c.x + sx * d.r, d.c.y };
    if ( uy - d.r >= ux )
        return { d.c.x, d.c.y + sy * d.r };
    const double s = ux + uy, t = ux - uy;
    const double h = ( s - std::sqrt( std::max( 0.0, 2 * d.r * d.r - t * t ) ) ) / 2;
    return { p.x - sx * h, p.y - sy * h };
}

Vec2 sense( Vec2 p, const std::vector< Disc >& obstacles )
{
    constexpr double far = std::numeric_limits< double >::max() / 4;
    Vec2 best{ far, far };
    double best_d = std::numeric_limits< double >::infinity();
    for ( const auto& o : obstacles )
    {
        auto q = closest_point_inf( p, o );
        double dist = norm( { p.x - q.x, p.y - q.y }, Norm::Infinity );
        if ( dist < best_d )
        {
            best_d = dist;
            best = q;
        }
    }
    return best;
}

} // namespace ritmp::safety
