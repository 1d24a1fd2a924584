#pragma once

#include "ritmp/simkit/state.hpp"

namespace ritmp::simkit
{

/// f(x, u) = (v cos theta, v sin theta, omega, a, alpha).
RobotState derivative( const RobotState& s, const Control& u );

/// One classical Runge-Kutta step without clamping or angle wrapping.
RobotState rk4( const RobotState& s, const Control& u, double dt );

/// RK4 step of Eq. 1. When braking would drive v below zero the step is split at the stopping time and
/// the remainder runs with a = 0, so v lands on exactly 0. Theta is wrapped into (-pi, pi].
RobotState step_dynamics( const RobotState& s, const Control& u, double dt );

} // namespace ritmp::simkit
