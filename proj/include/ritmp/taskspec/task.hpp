#pragma once

#include "ritmp/ltlk/formula.hpp"
#include "ritmp/ltlk/trace.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ritmp::taskspec
{

struct Action
{
    std::string name;
    /// Over step-k variables only.
    ltlk::Formula pre;
    /// Over step-k and step-(k+1) variables (at most one next).
    ltlk::Formula eff;
};

using Assignment = std::vector< std::pair< ltlk::VarId, Rational > >;

struct TaskLanguage
{
    ltlk::VariableUniverse universe;
    std::vector< Action > actions;
    /// Full initial valuation, indexed by VarId.
    std::vector< Rational > v0;
    /// Final constraint; may leave variables free.
    Assignment vf;
};

/// Throws std::invalid_argument on duplicate action names, missing initial values or
/// out-of-domain values.
void validate_task( const TaskLanguage& task );

struct TaskEncoding
{
    /// The task universe plus the action variable.
    ltlk::VariableUniverse universe;
    ltlk::VarId action = 0;
    ltlk::Formula phi;
};

/// (v = v0) && G (last -> v = vf) && G [ 1 <= a <= |A| && and_i ((a = i && !last) -> pre_i && eff_i) ]
TaskEncoding build_phi_task( const TaskLanguage& task );

struct TaskCheck
{
    bool ok = true;
    /// 1-based action number of the first failing transition, 0 for initial/final-state failures.
    std::size_t step = 0;
    std::string reason;
};

/// Replays a trace over `enc.universe` through the oracle: initial and final valuations and
/// every step's precondition and effect.
TaskCheck check_plan_against_task( const ltlk::BoundedTrace& trace, const TaskLanguage& task,
                                   const TaskEncoding& enc );

} // namespace ritmp::taskspec
