#include "ritmp/geometry/polytope.hpp"

#include <algorithm>
#include <stdexcept>

namespace ritmp::geometry
{

HPolytope::HPolytope( std::vector< Facet > facets ) : _facets{ std::move( facets ) }
{
    for ( const auto& f : _facets )
        if ( f.hx == 0 && f.hy == 0 )
            throw std::invalid_argument( "polytope facet with zero normal" );
}

bool HPolytope::contains( const Point& p ) const
{
    return std::all_of( _facets.begin(), _facets.end(), [ & ]( const Facet& f ) { return f.contains( p ); } );
}

HPolytope box( const Rational& xmin, const Rational& ymin, const Rational& xmax, const Rational& ymax )
{
    if ( xmin > xmax || ymin > ymax )
        throw std::invalid_argument( "box with min > max" );
    return HPolytope{ { { 1, 0, xmax }, { 0, 1, ymax }, { -1, 0, -xmin }, { 0, -1, -ymin } } };
}

HPolytope from_vertices( const std::vector< Point >& ccw )
{
    if ( ccw.size() < 3 )
        throw std::invalid_argument( "polygon needs at least 3 vertices" );
    std::vector< Facet > facets;
    for ( std::size_t i = 0; i < ccw.size(); ++i )
    {
        const Point& a = ccw[ i ];
        const Point& b = ccw[ ( i + 1 ) % ccw.size() ];
        Rational hx = b.y - a.y;
        Rational hy = a.x - b.x;
        facets.push_back( { hx, hy, hx * a.x + hy * a.y } );
    }
    return HPolytope{ std::move( facets ) };
}

namespace
{

Rational cross( const Point& o, const Point& a, const Point& b )
{
    return ( a.x - o.x ) * ( b.y - o.y ) - ( a.y - o.y ) * ( b.x - o.x );
}

} // namespace

std::vector< Point > convex_hull( std::vector< Point > pts )
{
    std::sort( pts.begin(), pts.end(), []( const Point& a, const Point& b ) {
        return a.x < b.x || ( a.x == b.x && a.y < b.y );
    } );
    pts.erase( std::unique( pts.begin(), pts.end() ), pts.end() );
    if ( pts.size() < 3 )
        return pts;
    std::vector< Point > hull( 2 * pts.size() );
    std::size_t n = 0;
    for ( const auto& p : pts )
    {
        while ( n >= 2 && cross( hull[ n - 2 ], hull[ n - 1 ], p ) <= 0 )
            --n;
        hull[ n++ ] = p;
    }
    for ( std::size_t i = pts.size() - 1, lower = n + 1; i-- > 0; )
    {
        while ( n >= lower && cross( hull[ n - 2 ], hull[ n - 1 ], pts[ i ] ) <= 0 )
            --n;
        hull[ n++ ] = pts[ i ];
    }
    hull.resize( n - 1 );
    return hull;
}

namespace
{

struct Bound
{
    Rational value;
    bool strict = false;
};

// Tightest lower/upper bounds; a strict bound wins over a non-strict one at equal value.
void tighten_lower( std::optional< Bound >& lo, const Rational& v, bool strict )
{
    if ( !lo || v > lo->value || ( v == lo->value && strict ) )
        lo = Bound{ v, strict };
}

void tighten_upper( std::optional< Bound >& hi, const Rational& v, bool strict )
{
    if ( !hi || v < hi->value || ( v == hi->value && strict ) )
        hi = Bound{ v, strict };
}

std::optional< Rational > pick( const std::optional< Bound >& lo, const std::optional< Bound >& hi )
{
    if ( lo && hi )
    {
        if ( lo->value > hi->value )
            return std::nullopt;
        if ( lo->value == hi->value )
        {
            if ( lo->strict || hi->strict )
                return std::nullopt;
            return lo->value;
        }
        if ( !lo->strict )
            return lo->value;
        if ( !hi->strict )
            return hi->value;
        return ( lo->value + hi->value ) / 2;
    }
    if ( lo )
        return lo->strict ? Rational{ lo->value + 1 } : lo->value;
    if ( hi )
        return hi->strict ? Rational{ hi->value - 1 } : hi->value;
    return Rational{ 0 };
}

struct Row1
{
    Rational a;
    Rational c;
    bool strict;
};

} // namespace

std::optional< Point > find_point( const std::vector< Constraint >& system )
{
    std::vector< const Constraint* > up;
    std::vector< const Constraint* > down;
    std::vector< Row1 > xrows;
    for ( const auto& r : system )
    {
        if ( r.f.hy > 0 )
            up.push_back( &r );
        else if ( r.f.hy < 0 )
            down.push_back( &r );
        else
            xrows.push_back( { r.f.hx, r.f.c, r.strict } );
    }
    // y <= (c_p - a_p x)/b_p and y >= (c_n - a_n x)/b_n combine into one row in x.
    for ( const auto* p : up )
        for ( const auto* n : down )
            xrows.push_back( { p->f.hx / p->f.hy - n->f.hx / n->f.hy, p->f.c / p->f.hy - n->f.c / n->f.hy,
                               p->strict || n->strict } );

    std::optional< Bound > lo;
    std::optional< Bound > hi;
    for ( const auto& r : xrows )
    {
        if ( r.a > 0 )
            tighten_upper( hi, r.c / r.a, r.strict );
        else if ( r.a < 0 )
            tighten_lower( lo, r.c / r.a, r.strict );
        else if ( r.c < 0 || ( r.c == 0 && r.strict ) )
            return std::nullopt;
    }
    auto x = pick( lo, hi );
    if ( !x )
        return std::nullopt;

    std::optional< Bound > ylo;
    std::optional< Bound > yhi;
    for ( const auto* p : up )
        tighten_upper( yhi, ( p->f.c - p->f.hx * *x ) / p->f.hy, p->strict );
    for ( const auto* n : down )
        tighten_lower( ylo, ( n->f.c - n->f.hx * *x ) / n->f.hy, n->strict );
    auto y = pick( ylo, yhi );
    if ( !y )
        throw std::logic_error( "Fourier-Motzkin back-substitution found an empty slice" );
    return Point{ *x, *y };
}

std::vector< Constraint > closed_rows( const HPolytope& p )
{
    std::vector< Constraint > rows;
    rows.reserve( p.size() );
    for ( const auto& f : p.facets() )
        rows.push_back( { f, false } );
    return rows;
}

bool is_empty( const HPolytope& p ) { return !feasible( closed_rows( p ) ); }

bool is_bounded( const HPolytope& p )
{
    if ( p.facets().empty() || is_empty( p ) )
        return false;
    // A nonzero recession cone in the plane always has a ray along some facet line.
    for ( const auto& f : p.facets() )
        for ( int sign : { 1, -1 } )
        {
            Rational dx = -f.hy * sign;
            Rational dy = f.hx * sign;
            bool recedes = std::all_of( p.facets().begin(), p.facets().end(),
                                        [ & ]( const Facet& g ) { return g.hx * dx + g.hy * dy <= 0; } );
            if ( recedes )
                return false;
        }
    return true;
}

bool polytopes_intersect( const HPolytope& a, const HPolytope& b )
{
    auto rows = closed_rows( a );
    auto more = closed_rows( b );
    rows.insert( rows.end(), more.begin(), more.end() );
    return feasible( rows );
}

bool contained_in( const HPolytope& a, const HPolytope& b )
{
    auto rows = closed_rows( a );
    for ( const auto& f : b.facets() )
    {
        rows.push_back( { { -f.hx, -f.hy, -f.c }, true } );
        if ( feasible( rows ) )
            return false;
        rows.pop_back();
    }
    return true;
}

bool meets_interior( const HPolytope& p, const HPolytope& solid )
{
    auto rows = closed_rows( p );
    for ( const auto& f : solid.facets() )
        rows.push_back( { f, true } );
    return feasible( rows );
}

bool segment_meets_interior( const Point& a, const Point& b, const HPolytope& solid )
{
    // Unknown x stands for the segment parameter t in [0, 1].
    std::vector< Constraint > rows{ { { -1, 0, 0 }, false }, { { 1, 0, 1 }, false } };
    for ( const auto& f : solid.facets() )
    {
        Rational slope = f.hx * ( b.x - a.x ) + f.hy * ( b.y - a.y );
        if ( slope == 0 )
        {
            if ( f.eval( a ) >= f.c )
                return false;
            continue;
        }
        rows.push_back( { { slope, 0, f.c - f.eval( a ) }, true } );
    }
    return feasible( rows );
}

std::vector< Point > vertices( const HPolytope& p )
{
    const auto& fs = p.facets();
    std::vector< Point > out;
    for ( std::size_t i = 0; i < fs.size(); ++i )
        for ( std::size_t j = i + 1; j < fs.size(); ++j )
        {
            Rational det = fs[ i ].hx * fs[ j ].hy - fs[ i ].hy * fs[ j ].hx;
            if ( det == 0 )
                continue;
            Point q{ ( fs[ i ].c * fs[ j ].hy - fs[ i ].hy * fs[ j ].c ) / det,
                     ( fs[ i ].hx * fs[ j ].c - fs[ i ].c * fs[ j ].hx ) / det };
            if ( p.contains( q ) && std::find( out.begin(), out.end(), q ) == out.end() )
                out.push_back( q );
        }
    return convex_hull( std::move( out ) );
}

std::string to_string( const HPolytope& p )
{
    std::string s = "{";
    for ( std::size_t i = 0; i < p.size(); ++i )
    {
        const auto& f = p.facets()[ i ];
        if ( i > 0 )
            s += "; ";
        s += rational_to_string( f.hx ) + "*x + " + rational_to_string( f.hy ) + "*y <= " + rational_to_string( f.c );
    }
    return s + "}";
}

} // namespace ritmp::geometry
