#pragma once

#include "ritmp/geometry/polytope.hpp"
#include "ritmp/simkit/kernels.hpp"
#include "ritmp/simkit/state.hpp"

#include <optional>

namespace ritmp::simkit
{

struct DwaParams
{
    double A = 1.0;
    double B = 1.0;
    double alpha_max = 2.0;
    double v_max = 1.0;
    double omega_max = 1.5;
    /// Control period.
    double dt = 0.01;
    /// Cruise rollout length and integration step, seconds.
    double horizon = 1.0;
    double rollout_step = 0.05;
    int v_samples = 5;
    int omega_samples = 11;
    double pos_tol = 0.05;
    double heading_tol = 0.1;
    /// Keep-out radius around the sensed obstacle point.
    double D_s = 0.3;

    double w_progress = 1.0;
    double w_heading = 0.8;
    double w_clearance = 0.1;
    double w_speed = 0.1;
    double w_obstacle = 0.6;

    /// Throws std::invalid_argument on non-positive limits or periods.
    void validate() const;
};

struct Target
{
    double x = 0;
    double y = 0;
    double theta = 0;
};

/// Normalized double-precision copy of the facets.
FacetRows corridor_rows( const geometry::HPolytope& p );

/// Signed distance to the nearest facet (negative outside).
double slack( const FacetRows& f, double x, double y );

/// Within pos_tol and heading_tol of the target and stopped.
bool arrived( const RobotState& s, const Target& t, const DwaParams& p );

/// One dynamic-window decision. Samples (v, omega) reachable within one period, keeps samples whose
/// full-braking rollout stays in the corridor (no worse than the current position when it is already
/// outside) and clear of the obstacle point, then scores a cruise rollout by progress, heading,
/// clearance, speed and obstacle distance. Close to the target it stops and turns in place.
/// No admissible sample gives a full brake.
Control dwa_plan( const RobotState& s, const Target& target, const FacetRows& corridor,
                  std::optional< Vec2 > obstacle, const DwaParams& p );

Control dwa_plan( const RobotState& s, const Target& target, const geometry::HPolytope& corridor,
                  std::optional< Vec2 > obstacle, const DwaParams& p );

} // namespace ritmp::simkit
