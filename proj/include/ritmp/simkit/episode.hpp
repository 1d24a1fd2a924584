#pragma once

#include "ritmp/missiongame/mission.hpp"
#include "ritmp/safety/supervisor.hpp"
#include "ritmp/simkit/dwa.hpp"
#include "ritmp/simkit/obstacles.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ritmp::simkit
{

struct TraceRow
{
    double t = 0;
    RobotState s;
    Control u;
    safety::Mode mode = safety::Mode::Drive;
    /// 1-based plan step being executed.
    std::size_t step = 0;
    std::string action;
    std::vector< Vec2 > obstacles;
};

struct TraceRecord
{
    double dt = 0.01;
    std::vector< std::string > obstacle_names;
    std::vector< TraceRow > rows;
};

/// Header t,px,py,theta,v,omega,a,alpha,mode,step,action,obst1x,obst1y,...
void write_csv( const TraceRecord& trace, std::ostream& out );

/// Inverse of write_csv. Throws std::runtime_error naming the line on malformed input.
TraceRecord read_csv( std::istream& in );

/// max |-xdot sin(theta) + ydot cos(theta)| with central differences over interior rows.
double nonholonomic_residual( const TraceRecord& trace );

struct LoopParams
{
    safety::SafetyParams safety;
    DwaParams dwa;
    double dt = 0.01;
    double sensor_range = 5.0;

    /// DWA limits must match the supervisor, dt > 0 and eps >= 2 dt.
    void validate() const;
};

/// Mutable closed-loop state shared across plan steps.
struct World
{
    RobotState robot;
    std::vector< ObstacleModel > obstacles;
    safety::SupervisorState supervisor;
    double t = 0;
    std::size_t ticks = 0;
    std::size_t override_ticks = 0;
};

/// Infinity-closest point over the obstacle discs whose boundary lies within range (Euclidean).
std::optional< Vec2 > sensed_point( const World& w, double range );

/// One control period: sense, plan, supervise, record, integrate, move obstacles.
void tick( World& w, const Target& target, const FacetRows& corridor, const LoopParams& p, std::size_t step,
           const std::string& action, TraceRecord* trace );

enum class DriveStatus
{
    Arrived,
    Blocked,
    OutOfTime
};

struct DriveLimits
{
    /// Absolute end of the episode.
    double deadline = 1e9;
    /// Continuous override longer than this counts as blocked.
    double override_timeout = 20;
    /// A single plan step taking longer than this counts as blocked.
    double step_timeout = 90;
};

DriveStatus drive_to( World& w, const Target& target, const FacetRows& corridor, const LoopParams& p,
                      std::size_t step, const std::string& action, const DriveLimits& limits, TraceRecord* trace );

enum class EpisodeStatus
{
    Completed,
    Blocked,
    OutOfTime
};

const char* episode_status_name( EpisodeStatus s );

struct TaskEvent
{
    double t = 0;
    std::string action;
    /// Nearest named location within the arrival tolerance, empty otherwise.
    std::string location;
};

struct EpisodeConfig
{
    LoopParams loop;
    std::vector< ObstacleModel > obstacles;
    /// Graph state to start from; the strategy's first initial state when absent.
    std::optional< std::size_t > start_state;
    /// Start pose; the start state's robot location (heading 0) when absent.
    std::optional< RobotState > start_pose;
    /// Environment edge names taken in order at environment turns; afterwards "idle" when available,
    /// otherwise a seeded uniform pick.
    std::vector< std::string > env_script;
    double max_t = 600;
    DriveLimits limits;
    std::size_t max_mission_steps = 64;
    std::uint64_t seed = 0;
};

struct EpisodeResult
{
    EpisodeStatus status = EpisodeStatus::Completed;
    missiongame::Verdict verdict = missiongame::Verdict::Undetermined;
    std::string detail;
    TraceRecord trace;
    std::vector< std::size_t > mission_states;
    std::vector< std::string > system_actions;
    std::vector< TaskEvent > events;
    std::size_t override_ticks = 0;
};

/// Executes the strategy: system turns run the chosen edge's plan step by step through DWA under the
/// supervisor, environment turns follow the script. Deterministic given the config.
EpisodeResult run_episode( const missiongame::MissionGraph& g, const missiongame::WinningCondition& w,
                           const missiongame::MissionStrategy& s, const EpisodeConfig& cfg );

/// Ticks with Euclidean robot-to-disc distance <= D_s while v > 0.
std::size_t moving_collisions( const TraceRecord& trace, const std::vector< double >& radii, double D_s );

} // namespace ritmp::simkit
