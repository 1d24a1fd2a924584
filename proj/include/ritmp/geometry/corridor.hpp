#pragma once

#include "ritmp/geometry/polytope.hpp"
#include "ritmp/ltlk/formula.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ritmp::geometry
{

struct Workspace
{
    HPolytope boundary;
    std::vector< HPolytope > obstacles;
};

/// Workspace boundary must be bounded, obstacles nonempty.
void validate_workspace( const Workspace& ws );

struct CObstacle
{
    HPolytope inflated;
    std::size_t source = 0;
    Rational radius;
};

struct Tunnel
{
    std::vector< HPolytope > polytopes;
};

class EmptyObstacle : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Facet-wise offset by radius * |h|. The norm is rounded up when irrational, which
/// only enlarges the region.
CObstacle c_obstacle( const HPolytope& obstacle, const Rational& radius, std::size_t source = 0 );

std::vector< CObstacle > c_obstacles( const Workspace& ws, const Rational& radius );

/// Outward half-plane of facet j of a C-obstacle: -g.p <= -d.
Facet outward( const Facet& inflated_facet );

/// G [ (and_i w_i) && and_obstacles or_j ( b_ij && X b_ij ) ] over position variables px, py.
ltlk::Formula build_phi_safe( const Workspace& ws, const std::vector< CObstacle >& cobs, ltlk::VarId px,
                              ltlk::VarId py );

/// Index of the first outward half-plane that contains both points, if any.
std::optional< std::size_t > shared_outward_facet( const CObstacle& cob, const Point& a, const Point& b );

/// Workspace facets plus, per C-obstacle, the first outward half-plane containing both points.
/// Throws std::runtime_error when some obstacle has no such half-plane.
HPolytope segment_polytope( const Workspace& ws, const std::vector< CObstacle >& cobs, const Point& a,
                            const Point& b );

struct TunnelReport
{
    bool ok = true;
    std::string violation;
};

/// Checks, member by member (1-based in the report): nonempty, inside the workspace,
/// clear of every C-obstacle interior, and overlapping the next member.
TunnelReport tunnel_valid( const Tunnel& tunnel, const Workspace& ws, const std::vector< CObstacle >& cobs );

} // namespace ritmp::geometry
