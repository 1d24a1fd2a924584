#pragma once

#include <cmath>

namespace ritmp::simkit
{

struct Vec2
{
    double x = 0;
    double y = 0;
};

/// Eq. 1 state; theta kept in (-pi, pi].
struct RobotState
{
    double x = 0;
    double y = 0;
    double theta = 0;
    double v = 0;
    double omega = 0;

    [[nodiscard]] Vec2 position() const { return { x, y }; }
};

struct Control
{
    double a = 0;
    double alpha = 0;
};

inline double wrap_angle( double a )
{
    constexpr double pi = 3.14159265358979323846;
    a = std::remainder( a, 2 * pi );
    return a <= -pi ? a + 2 * pi : a;
}

} // namespace ritmp::simkit
