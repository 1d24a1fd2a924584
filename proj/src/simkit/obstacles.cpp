#include "ritmp/simkit/obstacles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ritmp::simkit
{

const char* obstacle_policy_name( ObstaclePolicy p )
{
    switch ( p )
    {
    case ObstaclePolicy::Static:
        return "static";
    case ObstaclePolicy::WaypointLoop:
        return "waypoint-loop";
    case ObstaclePolicy::HeadOn:
        return "head-on";
    case ObstaclePolicy::Scripted:
        return "scripted";
    }
    return "?";
}

ObstaclePolicy parse_obstacle_policy( const std::string& name )
{
    for ( auto p : { ObstaclePolicy::Static, ObstaclePolicy::WaypointLoop, ObstaclePolicy::HeadOn,
                     ObstaclePolicy::Scripted } )
        if ( name == obstacle_policy_name( p ) )
            return p;
    throw std::invalid_argument( "unknown obstacle policy '" + name + "'" );
}

Vec2 script_position( const std::vector< ScriptPoint >& script, double t )
{
    if ( script.empty() )
        return {};
    if ( t <= script.front().t )
        return { script.front().x, script.front().y };
    for ( std::size_t i = 1; i < script.size(); ++i )
    {
        const auto& a = script[ i - 1 ];
        const auto& b = script[ i ];
        if ( t <= b.t )
        {
            const double s = b.t > a.t ? ( t - a.t ) / ( b.t - a.t ) : 1.0;
            return { a.x + s * ( b.x - a.x ), a.y + s * ( b.y - a.y ) };
        }
    }
    return { script.back().x, script.back().y };
}

namespace
{

// Move toward `goal` by at most `reach`; returns the distance left.
double approach( Vec2& p, Vec2 goal, double reach )
{
    const double dx = goal.x - p.x, dy = goal.y - p.y;
    const double d = std::hypot( dx, dy );
    if ( d <= reach )
    {
        p = goal;
        return 0;
    }
    p.x += dx / d * reach;
    p.y += dy / d * reach;
    return d - reach;
}

} // namespace

void step_obstacle( ObstacleModel& o, const RobotState& robot, double t, double dt )
{
    const double reach = std::max( 0.0, o.speed ) * dt;
    switch ( o.policy )
    {
    case ObstaclePolicy::Static:
        return;
    case ObstaclePolicy::WaypointLoop:
        if ( o.waypoints.empty() )
            return;
        if ( approach( o.position, o.waypoints[ o.next_waypoint % o.waypoints.size() ], reach ) == 0 )
            o.next_waypoint = ( o.next_waypoint + 1 ) % o.waypoints.size();
        return;
    case ObstaclePolicy::HeadOn:
    {
        const double dx = robot.x - o.position.x, dy = robot.y - o.position.y;
        const double d = std::hypot( dx, dy );
        const double room = std::max( 0.0, d - o.radius );
        if ( room > 0 )
            approach( o.position, robot.position(), std::min( reach, room ) );
        return;
    }
    case ObstaclePolicy::Scripted:
        approach( o.position, script_position( o.script, t + dt ), reach );
        return;
    }
}

} // namespace ritmp::simkit
