#pragma once

#include "ritmp/encoder/encoder.hpp"
#include "ritmp/geometry/corridor.hpp"
#include "ritmp/taskspec/task.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ritmp::itmp
{

struct Configuration
{
    Rational x;
    Rational y;
    Rational theta;

    friend bool operator==( const Configuration&, const Configuration& ) = default;
};

struct PlanRequest
{
    geometry::Workspace workspace;
    std::vector< geometry::CObstacle > cobstacles;
    taskspec::TaskLanguage task;
    /// Pose variables of the task universe; resolved by name ("px", "py", "theta") when absent.
    std::optional< ltlk::VarId > px;
    std::optional< ltlk::VarId > py;
    std::optional< ltlk::VarId > theta;
    std::size_t K_max = 20;
};

struct Plan
{
    std::size_t K = 0;
    /// a^[1..K] as 1-based indices into the task's action list.
    std::vector< std::size_t > T;
    std::vector< std::string > action_names;
    /// y^[0] is the start; Y holds y^[1..K].
    Configuration start;
    std::vector< Configuration > Y;
    geometry::Tunnel P;
    ltlk::BoundedTrace trace;
};

/// phi_safe && phi_T together with the universe that includes the action variable.
struct PlanFormula
{
    taskspec::TaskEncoding task;
    ltlk::Formula phi;
    ltlk::VarId px = 0;
    ltlk::VarId py = 0;
    ltlk::VarId theta = 0;
};

PlanFormula plan_formula( const PlanRequest& request );

struct Attempt
{
    std::size_t K = 0;
    encoder::Status status = encoder::Status::Unknown;
    double seconds = 0;
};

struct ItmpResult
{
    encoder::Status status = encoder::Status::Unsat;
    std::optional< Plan > plan;
    std::vector< Attempt > attempts;
    /// Script of the last horizon tried (the SAT one on success).
    std::string smt_script;
    std::string diagnostic;
};

/// Iterative deepening over K = 1..K_max; the first SAT horizon wins. UNKNOWN stops the loop.
ItmpResult itmp( const PlanRequest& request, const encoder::SolverConfig& solver );

class SelectorInconsistency : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// T from the action variable, Y from the pose, P^[k] from the half-planes shared by
/// y^[k-1] and y^[k] (so P^[k] holds the whole segment into y^[k]).
Plan extract_plan( const ltlk::BoundedTrace& trace, const PlanRequest& request, const PlanFormula& formula );

struct Check
{
    std::string name;
    bool ok = true;
    std::string detail;
};

struct ValidationReport
{
    bool ok = true;
    std::vector< Check > checks;

    [[nodiscard]] const Check* find( const std::string& name ) const;
};

/// Checks: oracle, action-range, trace-agreement, task, tunnel, containment, polyline.
ValidationReport validate_plan( const Plan& plan, const PlanRequest& request );

} // namespace ritmp::itmp
