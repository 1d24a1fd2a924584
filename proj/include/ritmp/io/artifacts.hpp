#pragma once

#include "ritmp/io/scenario.hpp"
#include "ritmp/itmp/itmp.hpp"
#include "ritmp/missiongame/mission.hpp"
#include "ritmp/simkit/episode.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace ritmp::io
{

inline constexpr int artifact_schema_version = 1;

/// Malformed or mismatched persisted artifact.
class ArtifactError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json polytope_to_json( const geometry::HPolytope& p );
geometry::HPolytope polytope_from_json( const nlohmann::json& j );

/// {K, start, steps: [{k, action, action_index, target: [x, y, theta], polytope}], trace}; rationals as strings.
nlohmann::json plan_to_json( const itmp::Plan& plan );
itmp::Plan plan_from_json( const nlohmann::json& j );

nlohmann::json graph_to_json( const missiongame::MissionGraph& g, const std::string& scenario );

/// Rebuilds the graph against the scenario's mission configuration; a state list that differs from
/// the scenario's enumeration is an ArtifactError.
missiongame::MissionGraph graph_from_json( const nlohmann::json& j, const Scenario& s );

nlohmann::json strategy_to_json( const missiongame::MissionGraph& g, const missiongame::WinningCondition& w,
                                 const missiongame::MissionStrategy& s, const std::string& scenario );
missiongame::MissionStrategy strategy_from_json( const nlohmann::json& j, const missiongame::MissionGraph& g );

/// Standalone SVG: workspace, static obstacles, locations, optional tunnel, trajectory and obstacle paths.
std::string render_svg( const Scenario& s, const simkit::TraceRecord* trace, const geometry::Tunnel* tunnel );

} // namespace ritmp::io
