#pragma once

#include "ritmp/simkit/state.hpp"

#include <string>
#include <vector>

namespace ritmp::simkit
{

enum class ObstaclePolicy
{
    Static,
    WaypointLoop,
    HeadOn,
    Scripted
};

const char* obstacle_policy_name( ObstaclePolicy p );

/// Accepts "static", "waypoint-loop", "head-on", "scripted". Throws std::invalid_argument otherwise.
ObstaclePolicy parse_obstacle_policy( const std::string& name );

struct ScriptPoint
{
    double t = 0;
    double x = 0;
    double y = 0;
};

/// A moving disc. Every step moves the center by at most speed * dt.
struct ObstacleModel
{
    std::string name;
    ObstaclePolicy policy = ObstaclePolicy::Static;
    Vec2 position;
    double radius = 0.2;
    double speed = 0.8;
    /// Cycled through by waypoint-loop.
    std::vector< Vec2 > waypoints;
    /// Piecewise-linear schedule for scripted; held at the ends.
    std::vector< ScriptPoint > script;
    std::size_t next_waypoint = 0;
};

/// Position the script asks for at time t.
Vec2 script_position( const std::vector< ScriptPoint >& script, double t );

/// Advance one period ending at time t + dt. Head-on drives at the robot until the disc touches its center.
void step_obstacle( ObstacleModel& o, const RobotState& robot, double t, double dt );

} // namespace ritmp::simkit
