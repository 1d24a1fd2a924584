#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ritmp::missiongame
{

enum class Player
{
    System,
    Environment
};

/// Explicit turn-based arena. A player with no move at its own state loses the play.
struct Game
{
    std::vector< Player > owner;
    std::vector< std::vector< std::size_t > > succ;

    [[nodiscard]] std::size_t size() const { return owner.size(); }
};

using StateSet = std::vector< bool >;

enum class ObjectiveKind
{
    Safety,
    Reachability,
    GeneralizedBuchi,
    SafetyGeneralizedBuchi
};

class UnsupportedObjective : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// "safety", "reachability", "generalized-buchi", "safety-generalized-buchi"; anything else throws.
ObjectiveKind parse_objective_kind( const std::string& text );
std::string objective_kind_name( ObjectiveKind k );

/// Safety uses `safe`; Reachability uses goals[0]; the Büchi kinds use every goal (and `safe`).
struct Objective
{
    ObjectiveKind kind = ObjectiveKind::Safety;
    StateSet safe;
    std::vector< StateSet > goals;
};

/// (memory, state) -> move, plus the memory update taken when leaving a state.
struct Strategy
{
    std::size_t memory_size = 1;
    std::size_t initial_memory = 0;
    /// choice[m][s]: index into succ[s]; only meaningful at system states with moves.
    std::vector< std::vector< std::size_t > > choice;
    /// next[m][s]: memory after leaving s.
    std::vector< std::vector< std::size_t > > next;

    [[nodiscard]] std::size_t move( std::size_t memory, std::size_t state ) const { return choice.at( memory ).at( state ); }
    [[nodiscard]] std::size_t update( std::size_t memory, std::size_t state ) const { return next.at( memory ).at( state ); }
};

struct Solution
{
    StateSet winning;
    Strategy strategy;
};

/// CPre: system states with a successor in z, environment states with all successors in z.
StateSet cpre( const Game& g, const StateSet& z );

/// Attractor of `target` inside `within`; rank 0 on the target, -1 outside.
std::vector< long > attractor( const Game& g, const StateSet& target, const StateSet& within );

Solution solve( const Game& g, const Objective& objective );

enum class Verdict
{
    Satisfied,
    Violated,
    Undetermined
};

std::string verdict_name( Verdict v );

struct Playout
{
    Verdict verdict = Verdict::Undetermined;
    std::vector< std::size_t > states;
    std::vector< std::size_t > memory;
    std::string detail;
};

/// Picks an index into succ[state] for the environment.
using EnvPolicy = std::function< std::size_t( const Game&, std::size_t state, std::size_t step ) >;

EnvPolicy random_policy( std::uint64_t seed );
EnvPolicy first_move_policy();
/// Prefers moves into states outside `keep`; otherwise random.
EnvPolicy spoiler_policy( StateSet keep, std::uint64_t seed );

/// Plays the strategy against `env` from `start`. Safety: no unsafe state or system deadlock in
/// max_steps. Reachability: goal reached. Büchi kinds: a repeated (memory, state) pair whose cycle
/// visits every goal.
Playout play( const Game& g, const Objective& objective, const Strategy& s, const EnvPolicy& env, std::size_t start,
              std::size_t max_steps );

} // namespace ritmp::missiongame
