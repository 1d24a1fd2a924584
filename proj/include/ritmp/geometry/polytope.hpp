#pragma once

#include "ritmp/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ritmp::geometry
{

struct Point
{
    Rational x;
    Rational y;

    friend bool operator==( const Point&, const Point& ) = default;
};

/// Half-plane hx*x + hy*y <= c (or < c when used as a strict row of a system).
struct Facet
{
    Rational hx;
    Rational hy;
    Rational c;

    [[nodiscard]] Rational eval( const Point& p ) const { return hx * p.x + hy * p.y; }
    [[nodiscard]] bool contains( const Point& p ) const { return eval( p ) <= c; }

    friend bool operator==( const Facet&, const Facet& ) = default;
};

/// Closed convex region given by facets h.p <= c.
class HPolytope
{
public:
    HPolytope() = default;
    explicit HPolytope( std::vector< Facet > facets );

    [[nodiscard]] const std::vector< Facet >& facets() const { return _facets; }
    [[nodiscard]] std::size_t size() const { return _facets.size(); }
    [[nodiscard]] bool contains( const Point& p ) const;

    friend bool operator==( const HPolytope&, const HPolytope& ) = default;

private:
    std::vector< Facet > _facets;
};

HPolytope box( const Rational& xmin, const Rational& ymin, const Rational& xmax, const Rational& ymax );

/// Facets of the convex polygon whose vertices are listed counter-clockwise.
HPolytope from_vertices( const std::vector< Point >& ccw );

/// Counter-clockwise hull without collinear points.
std::vector< Point > convex_hull( std::vector< Point > points );

/// One row of a linear system; `strict` turns <= into <.
struct Constraint
{
    Facet f;
    bool strict = false;
};

/// Exact Fourier-Motzkin over two unknowns. Returns a witness when the system is feasible.
std::optional< Point > find_point( const std::vector< Constraint >& system );

inline bool feasible( const std::vector< Constraint >& system ) { return find_point( system ).has_value(); }

std::vector< Constraint > closed_rows( const HPolytope& p );

bool is_empty( const HPolytope& p );

/// Nonempty and every recession direction is zero.
bool is_bounded( const HPolytope& p );

bool polytopes_intersect( const HPolytope& a, const HPolytope& b );

/// a is a subset of b.
bool contained_in( const HPolytope& a, const HPolytope& b );

/// The closed polytope meets the open interior of `solid` (all rows strict).
bool meets_interior( const HPolytope& p, const HPolytope& solid );

/// The closed segment [a, b] meets the open interior of `solid`.
bool segment_meets_interior( const Point& a, const Point& b, const HPolytope& solid );

/// Counter-clockwise vertices of a bounded polytope.
std::vector< Point > vertices( const HPolytope& p );

std::string to_string( const HPolytope& p );

} // namespace ritmp::geometry
