#pragma once

#include "ritmp/encoder/encoder.hpp"
#include "ritmp/geometry/corridor.hpp"
#include "ritmp/missiongame/mission.hpp"
#include "ritmp/simkit/episode.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace ritmp::io
{

inline constexpr int scenario_schema_version = 1;

/// Input problem; `pointer` is the JSON pointer of the offending value.
class ScenarioError : public std::runtime_error
{
public:
    ScenarioError( std::string pointer, const std::string& message )
        : std::runtime_error( ( pointer.empty() ? "/" : pointer ) + ": " + message ), _pointer( std::move( pointer ) )
    {
    }

    [[nodiscard]] const std::string& pointer() const { return _pointer; }

private:
    std::string _pointer;
};

struct Scenario
{
    std::string name;
    geometry::Workspace workspace;
    std::vector< std::string > obstacle_names;
    Rational robot_radius;
    std::vector< geometry::CObstacle > cobstacles;

    /// Index into mission.locations where the controlled robot rests.
    std::size_t home = 0;
    simkit::RobotState start;
    simkit::LoopParams loop;

    missiongame::MissionConfig mission;
    /// Initial location per object.
    std::vector< std::size_t > placement;
    missiongame::EnvironmentModel env;
    std::vector< std::string > env_script;
    std::vector< simkit::ObstacleModel > moving;
    missiongame::WinningCondition condition;

    encoder::SolverConfig solver;
    std::size_t K_max = 20;
    std::uint64_t seed = 1;
    double max_t = 600;

    [[nodiscard]] missiongame::SynthesisOptions synthesis( std::size_t jobs ) const;
    [[nodiscard]] simkit::EpisodeConfig episode() const;
    /// The graph state matching the initial placement with the environment to move.
    [[nodiscard]] missiongame::MissionState initial_state() const;
};

/// Validates and resolves every name. `source` only labels messages.
Scenario parse_scenario( const nlohmann::json& j );

/// Reads and parses; unreadable files and JSON syntax errors are reported as ScenarioError at "/".
Scenario load_scenario( const std::string& path );

/// Predicate grammar: true | false | {"object_in": {"object", "locations"}} | {"robot_at": name}
/// | {"turn": "env"|"sys"} | {"not": p} | {"all": [p]} | {"any": [p]} | {"each_object_in": [names]}.
missiongame::Predicate parse_predicate( const nlohmann::json& j, const missiongame::MissionConfig& c,
                                        const std::string& pointer );

} // namespace ritmp::io
