#pragma once

#include "ritmp/taskspec/task.hpp"

namespace ritmp::taskspec
{

struct NamedLocation
{
    std::string name;
    Rational x;
    Rational y;
    /// Heading required on arrival; free when absent.
    std::optional< Rational > theta;
};

struct WarehouseVars
{
    ltlk::VarId px = 0;
    ltlk::VarId py = 0;
    ltlk::VarId theta = 0;
    ltlk::VarId holding = 0;
    /// Per object: location index in [0, L), or L while carried.
    std::vector< ltlk::VarId > object_loc;
    std::size_t carried = 0;
};

struct Warehouse
{
    std::vector< NamedLocation > locations;
    std::vector< std::string > objects;
    TaskLanguage task;
    WarehouseVars vars;

    [[nodiscard]] std::size_t location_index( const std::string& name ) const;
    [[nodiscard]] std::size_t object_index( const std::string& name ) const;
};

/// Variables px, py, theta, holding, loc_<object>; actions in the order
/// move(l) for every location, travel(), pick(o), drop(o, l).
/// move pins the next position (and heading when the location fixes one); travel leaves
/// it to the motion constraints; pick/drop keep the pose.
Warehouse warehouse_actions( const std::vector< NamedLocation >& locations, const std::vector< std::string >& objects );

/// Robot pose, empty gripper and object placements (location index per object).
void set_initial( Warehouse& w, const Rational& x, const Rational& y, const Rational& theta,
                  const std::vector< std::size_t >& placement );

/// Constrain the final robot location (when given) and object placements.
void set_goal( Warehouse& w, std::optional< std::size_t > robot_at, const std::vector< std::size_t >& placement );

/// Robot exactly at a location's coordinates.
ltlk::Formula robot_at( const Warehouse& w, std::size_t loc, unsigned nexts = 0 );

} // namespace ritmp::taskspec
