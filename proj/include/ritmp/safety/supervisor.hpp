#pragma once

#include "ritmp/simkit/state.hpp"

#include <vector>

namespace ritmp::safety
{

using simkit::Control;
using simkit::RobotState;
using simkit::Vec2;

struct SafetyParams
{
    double A = 1.0;
    double B = 1.0;
    double eps = 0.05;
    double V_obs = 0.8;
    double D_s = 0.3;

    /// Throws std::invalid_argument on A <= 0, B <= 0, eps < 0, V_obs < 0 or D_s <= 0.
    void validate() const;
};

enum class Mode
{
    Drive,
    Override
};

const char* mode_name( Mode m );

enum class Norm
{
    Euclidean,
    Infinity
};

double norm( Vec2 d, Norm n );

/// Right-hand side of the safe condition at speed v.
double safe_threshold( double v, const SafetyParams& p );

/// ||p - p*||_inf > safe_threshold(v).
bool safe_condition( const RobotState& robot, Vec2 obstacle_point, const SafetyParams& p );

/// v = 0 or ||p - p*|| > v^2/(2B) + V_obs v / B + D_s.
bool phi_pf( const RobotState& robot, Vec2 obstacle_point, const SafetyParams& p, Norm n = Norm::Euclidean );

struct SupervisorState
{
    Mode mode = Mode::Drive;
    /// Consecutive override ticks with v = 0 and safe.
    int calm_ticks = 0;
};

struct Decision
{
    Control command;
    SupervisorState state;
    bool safe = true;
};

/// Drive: proposed a clamped to [-B, A]. Unsafe: a = -B, alpha = 0, override. Override ends after
/// the robot has stood still with safe holding at two consecutive ticks.
Decision supervise( const RobotState& robot, Vec2 obstacle_point, Control proposed, const SafetyParams& p,
                    SupervisorState state );

/// False when supervise() will brake whatever is proposed, so the caller may skip planning.
bool uses_proposal( const RobotState& robot, Vec2 obstacle_point, const SafetyParams& p, SupervisorState state );

struct Disc
{
    Vec2 c;
    double r = 0;
};

/// Point of the disc closest to p in the infinity norm (p itself when inside).
Vec2 closest_point_inf( Vec2 p, const Disc& d );

/// Sensor reading: the infinity-closest point over all discs. Empty input gives a point at infinity.
Vec2 sense( Vec2 p, const std::vector< Disc >& obstacles );

} // namespace ritmp::safety
