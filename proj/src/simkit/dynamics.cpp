#include "ritmp/simkit/dynamics.hpp"

#include <stdexcept>

namespace ritmp::simkit
{

RobotState derivative( const RobotState& s, const Control& u )
{
    return { s.v * std::cos( s.theta ), s.v * std::sin( s.theta ), s.omega, u.a, u.alpha };
}

namespace
{

RobotState axpy( const RobotState& s, double h, const RobotState& d )
{
    return { s.x + h * d.x, s.y + h * d.y, s.theta + h * d.theta, s.v + h * d.v, s.omega + h * d.omega };
}

} // namespace

RobotState rk4( const RobotState& s, const Control& u, double dt )
{
    const auto k1 = derivative( s, u );
    const auto k2 = derivative( axpy( s, dt / 2, k1 ), u );
    const auto k3 = derivative( axpy( s, dt / 2, k2 ), u );
    const auto k4 = derivative( axpy( s, dt, k3 ), u );
    auto comb = [ dt ]( double x, double a, double b, double c, double d ) {
        return x + dt / 6 * ( a + 2 * b + 2 * c + d );
    };
    return { comb( s.x, k1.x, k2.x, k3.x, k4.x ), comb( s.y, k1.y, k2.y, k3.y, k4.y ),
             comb( s.theta, k1.theta, k2.theta, k3.theta, k4.theta ), comb( s.v, k1.v, k2.v, k3.v, k4.v ),
             comb( s.omega, k1.omega, k2.omega, k3.omega, k4.omega ) };
}

RobotState step_dynamics( const RobotState& s, const Control& u, double dt )
{
    if ( !( dt > 0 ) )
        throw std::invalid_argument( "dt must be positive" );
    RobotState out;
    if ( u.a < 0 && s.v + u.a * dt < 0 )
    {
        const double stop = s.v / -u.a;
        out = stop > 0 ? rk4( s, u, stop ) : s;
        out.v = 0;
        out = rk4( out, { 0, u.alpha }, dt - stop );
        out.v = 0;
    }
    else
        out = rk4( s, u, dt );
    if ( out.v < 0 )
        out.v = 0;
    out.theta = wrap_angle( out.theta );
    return out;
}

} // namespace ritmp::simkit
