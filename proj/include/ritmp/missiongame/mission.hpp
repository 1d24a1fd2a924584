#pragma once

#include "ritmp/itmp/itmp.hpp"
#include "ritmp/missiongame/game.hpp"
#include "ritmp/taskspec/warehouse.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ritmp::missiongame
{

/// Turn values: 1 = environment, 2 = system.
inline constexpr int EnvTurn = 1;
inline constexpr int SysTurn = 2;

struct MissionConfig
{
    std::vector< taskspec::NamedLocation > locations;
    std::vector< std::string > objects;
    /// Indices into `locations` where objects may rest.
    std::vector< std::size_t > object_slots;
    /// Indices into `locations` where the controlled robot rests between tasks.
    std::vector< std::size_t > robot_slots;
    std::size_t max_states = 1'000'000;
    /// A system task relocates at most this many objects.
    std::size_t max_moved_objects = 1;
};

void validate_config( const MissionConfig& c );

struct MissionState
{
    std::size_t robot = 0;
    /// Location index per object.
    std::vector< std::size_t > objects;
    int turn = SysTurn;

    friend bool operator==( const MissionState&, const MissionState& ) = default;
};

std::string to_string( const MissionState& m, const MissionConfig& c );

class StateCapExceeded : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// |robot_slots| * (#injective placements of objects into object_slots).
std::uint64_t count_states( const MissionConfig& c );

/// Robot slot, then placement in lexicographic order, then turn (1 before 2).
std::vector< MissionState > enumerate_states( const MissionConfig& c );

/// Atomic predicates over object and robot locations, closed under boolean connectives.
class Predicate
{
public:
    enum class Kind
    {
        True,
        False,
        ObjectIn,
        RobotAt,
        Turn,
        Not,
        And,
        Or
    };

    static Predicate truth( bool value );
    static Predicate object_in( std::size_t object, std::vector< std::size_t > locations );
    static Predicate robot_at( std::size_t location );
    static Predicate turn( int sigma );
    static Predicate negate( Predicate p );
    static Predicate all( std::vector< Predicate > parts );
    static Predicate any( std::vector< Predicate > parts );

    [[nodiscard]] bool eval( const MissionState& m ) const;
    [[nodiscard]] Kind kind() const { return _kind; }
    [[nodiscard]] std::string to_string( const MissionConfig& c ) const;

private:
    Kind _kind = Kind::True;
    std::size_t _index = 0;
    std::vector< std::size_t > _locations;
    std::vector< Predicate > _parts;
};

struct WinningCondition
{
    Predicate init;
    ObjectiveKind kind = ObjectiveKind::Safety;
    Predicate safe;
    std::vector< Predicate > goals;
};

/// Environment move: `object` goes from `from` to the free location `to` on the environment's turn.
struct EnvRule
{
    std::string name;
    std::size_t object = 0;
    std::size_t from = 0;
    std::size_t to = 0;
};

struct EnvironmentModel
{
    std::vector< EnvRule > rules;
    /// Adds a self-returning skip edge at every environment state.
    bool may_idle = true;
};

struct SymbolicAction
{
    std::size_t id = 0;
    std::string name;
    std::uint64_t fingerprint = 0;
    std::shared_ptr< const itmp::Plan > plan;
    bool plan_valid = false;
};

struct SystemEdge
{
    std::size_t from = 0;
    std::size_t to = 0;
    std::size_t action = 0;
};

struct EnvEdge
{
    std::size_t from = 0;
    std::size_t to = 0;
    std::string name;
};

struct MissionGraph
{
    MissionConfig config;
    std::vector< MissionState > states;
    std::vector< SystemEdge > system_edges;
    std::vector< EnvEdge > env_edges;
    std::vector< SymbolicAction > actions;
    /// Candidate system edges whose search ended UNKNOWN.
    std::vector< std::pair< std::size_t, std::size_t > > unknown_edges;
    std::size_t candidates = 0;

    [[nodiscard]] std::size_t find( const MissionState& m ) const;
};

std::vector< EnvEdge > environment_edges( const MissionConfig& c, const std::vector< MissionState >& states,
                                          const EnvironmentModel& env );

struct SynthesisOptions
{
    std::size_t K_max = 20;
    std::size_t jobs = 1;
    encoder::SolverConfig solver;
};

/// Robot-at-home warehouse task language for the edge m -> m'.
taskspec::Warehouse edge_task( const MissionConfig& c, const MissionState& from, const MissionState& to );

/// One ITMP run per candidate (system state, environment state) pair.
MissionGraph synth_mission_graph( const MissionConfig& c, const EnvironmentModel& env,
                                  const geometry::Workspace& ws, const std::vector< geometry::CObstacle >& cobs,
                                  const SynthesisOptions& opt );

/// succ lists follow system_edges then env_edges order; `edge_of[s][k]` names the edge behind succ[s][k]
/// (system edges as-is, environment edges offset by |system_edges|).
struct Arena
{
    Game game;
    std::vector< std::vector< std::size_t > > edge_of;
};

Arena to_arena( const MissionGraph& g );

Objective to_objective( const MissionGraph& g, const WinningCondition& w );

struct MissionStrategy
{
    Strategy strategy;
    StateSet winning;
    std::vector< std::size_t > initial_states;
};

/// Present iff every Psi_init state is winning.
std::optional< MissionStrategy > solve_game( const MissionGraph& g, const WinningCondition& w );

struct TransducerRow
{
    std::size_t memory = 0;
    std::size_t state = 0;
    std::size_t action = 0;
    std::size_t next_memory = 0;
    std::size_t target = 0;
};

/// Rows for every (memory, system state) reachable from the initial states under any environment.
std::vector< TransducerRow > strategy_to_transducer( const MissionGraph& g, const WinningCondition& w,
                                                     const MissionStrategy& s );

struct OutcomeReport
{
    Playout playout;
    /// Every symbolic action taken carries a validated plan.
    bool plans_valid = true;
    std::vector< std::size_t > actions_taken;
};

OutcomeReport check_outcomes( const MissionGraph& g, const WinningCondition& w, const MissionStrategy& s,
                              const EnvPolicy& env, std::size_t start, std::size_t max_steps );

/// GraphViz rendering; system states are boxes.
std::string to_dot( const MissionGraph& g );

} // namespace ritmp::missiongame
