#include "ritmp/io/artifacts.hpp"

#include <cstdio>
#include <sstream>

namespace ritmp::io
{

using nlohmann::json;

namespace
{

std::string q( const Rational& r ) { return rational_to_decimal_or_fraction( r ); }

Rational rq( const json& j )
{
    if ( !j.is_string() )
        throw ArtifactError( "expected a rational string, got " + j.dump() );
    return parse_rational( j.get< std::string >() );
}

const json& field( const json& j, const char* key )
{
    if ( !j.is_object() || !j.contains( key ) )
        throw ArtifactError( std::string( "missing field '" ) + key + "'" );
    return j.at( key );
}

void check_version( const json& j, const char* kind )
{
    if ( field( j, "schema_version" ).get< int >() != artifact_schema_version )
        throw ArtifactError( std::string( kind ) + ": unsupported schema version" );
    if ( field( j, "kind" ).get< std::string >() != kind )
        throw ArtifactError( std::string( "expected a " ) + kind + " artifact" );
}

std::string hex( std::uint64_t v )
{
    char buf[ 24 ];
    std::snprintf( buf, sizeof buf, "%016llx", static_cast< unsigned long long >( v ) );
    return buf;
}

} // namespace

json polytope_to_json( const geometry::HPolytope& p )
{
    json rows = json::array();
    for ( const auto& f : p.facets() )
        rows.push_back( { q( f.hx ), q( f.hy ), q( f.c ) } );
    return rows;
}

geometry::HPolytope polytope_from_json( const json& j )
{
    std::vector< geometry::Facet > rows;
    for ( const auto& r : j )
    {
        if ( !r.is_array() || r.size() != 3 )
            throw ArtifactError( "polytope rows are [hx, hy, c]" );
        rows.push_back( { rq( r[ 0 ] ), rq( r[ 1 ] ), rq( r[ 2 ] ) } );
    }
    return geometry::HPolytope( rows );
}

json plan_to_json( const itmp::Plan& plan )
{
    json j;
    j[ "K" ] = plan.K;
    j[ "start" ] = { q( plan.start.x ), q( plan.start.y ), q( plan.start.theta ) };
    json steps = json::array();
    for ( std::size_t k = 0; k < plan.K; ++k )
    {
        const auto& y = plan.Y[ k ];
        steps.push_back( { { "k", k + 1 },
                           { "action", plan.action_names[ k ] },
                           { "action_index", plan.T[ k ] },
                           { "target", { q( y.x ), q( y.y ), q( y.theta ) } },
                           { "polytope", polytope_to_json( plan.P.polytopes[ k ] ) } } );
    }
    j[ "steps" ] = steps;
    json tr = json::array();
    for ( const auto& row : plan.trace.steps )
    {
        json r = json::array();
        for ( const auto& v : row )
            r.push_back( q( v ) );
        tr.push_back( r );
    }
    j[ "trace" ] = { { "K", plan.trace.K }, { "steps", tr } };
    return j;
}

itmp::Plan plan_from_json( const json& j )
{
    itmp::Plan p;
    p.K = field( j, "K" ).get< std::size_t >();
    const auto& st = field( j, "start" );
    if ( !st.is_array() || st.size() != 3 )
        throw ArtifactError( "plan start is [x, y, theta]" );
    p.start = { rq( st[ 0 ] ), rq( st[ 1 ] ), rq( st[ 2 ] ) };
    const auto& steps = field( j, "steps" );
    if ( !steps.is_array() || steps.size() != p.K )
        throw ArtifactError( "plan needs K steps" );
    for ( std::size_t k = 0; k < p.K; ++k )
    {
        const auto& s = steps[ k ];
        if ( field( s, "k" ).get< std::size_t >() != k + 1 )
            throw ArtifactError( "plan steps out of order" );
        p.action_names.push_back( field( s, "action" ).get< std::string >() );
        p.T.push_back( field( s, "action_index" ).get< std::size_t >() );
        const auto& t = field( s, "target" );
        if ( !t.is_array() || t.size() != 3 )
            throw ArtifactError( "plan target is [x, y, theta]" );
        p.Y.push_back( { rq( t[ 0 ] ), rq( t[ 1 ] ), rq( t[ 2 ] ) } );
        p.P.polytopes.push_back( polytope_from_json( field( s, "polytope" ) ) );
    }
    if ( j.contains( "trace" ) )
    {
        const auto& tr = j.at( "trace" );
        p.trace.K = field( tr, "K" ).get< std::size_t >();
        for ( const auto& row : field( tr, "steps" ) )
        {
            std::vector< Rational > vals;
            for ( const auto& v : row )
                vals.push_back( rq( v ) );
            p.trace.steps.push_back( std::move( vals ) );
        }
    }
    return p;
}

json graph_to_json( const missiongame::MissionGraph& g, const std::string& scenario )
{
    const auto& c = g.config;
    json j;
    j[ "schema_version" ] = artifact_schema_version;
    j[ "kind" ] = "mission-graph";
    j[ "scenario" ] = scenario;
    json states = json::array();
    for ( const auto& m : g.states )
    {
        json objs = json::array();
        for ( auto l : m.objects )
            objs.push_back( c.locations[ l ].name );
        states.push_back( { { "robot", c.locations[ m.robot ].name },
                            { "objects", objs },
                            { "turn", m.turn == missiongame::EnvTurn ? "env" : "sys" } } );
    }
    j[ "states" ] = states;
    json actions = json::array();
    for ( const auto& a : g.actions )
        actions.push_back( { { "id", a.id },
                             { "name", a.name },
                             { "fingerprint", hex( a.fingerprint ) },
                             { "plan_valid", a.plan_valid },
                             { "plan", a.plan ? plan_to_json( *a.plan ) : json() } } );
    j[ "actions" ] = actions;
    json sys = json::array();
    for ( const auto& e : g.system_edges )
        sys.push_back( { { "from", e.from }, { "to", e.to }, { "action", e.action } } );
    j[ "system_edges" ] = sys;
    json env = json::array();
    for ( const auto& e : g.env_edges )
        env.push_back( { { "from", e.from }, { "to", e.to }, { "name", e.name } } );
    j[ "env_edges" ] = env;
    json unknown = json::array();
    for ( const auto& [ a, b ] : g.unknown_edges )
        unknown.push_back( { a, b } );
    j[ "unknown_edges" ] = unknown;
    j[ "candidates" ] = g.candidates;
    return j;
}

missiongame::MissionGraph graph_from_json( const json& j, const Scenario& s )
{
    check_version( j, "mission-graph" );
    missiongame::MissionGraph g;
    g.config = s.mission;
    g.states = missiongame::enumerate_states( g.config );
    const auto& states = field( j, "states" );
    if ( states.size() != g.states.size() )
        throw ArtifactError( "graph state count differs from the scenario; rerun `graph`" );
    for ( std::size_t i = 0; i < g.states.size(); ++i )
    {
        const auto& m = g.states[ i ];
        const auto& js = states[ i ];
        bool same = field( js, "robot" ).get< std::string >() == g.config.locations[ m.robot ].name &&
                    field( js, "turn" ).get< std::string >() == ( m.turn == missiongame::EnvTurn ? "env" : "sys" ) &&
                    field( js, "objects" ).size() == m.objects.size();
        for ( std::size_t o = 0; same && o < m.objects.size(); ++o )
            same = js.at( "objects" )[ o ].get< std::string >() == g.config.locations[ m.objects[ o ] ].name;
        if ( !same )
            throw ArtifactError( "graph state " + std::to_string( i ) + " differs from the scenario; rerun `graph`" );
    }
    for ( const auto& a : field( j, "actions" ) )
    {
        missiongame::SymbolicAction act;
        act.id = field( a, "id" ).get< std::size_t >();
        act.name = field( a, "name" ).get< std::string >();
        act.fingerprint = std::stoull( field( a, "fingerprint" ).get< std::string >(), nullptr, 16 );
        act.plan_valid = field( a, "plan_valid" ).get< bool >();
        if ( !field( a, "plan" ).is_null() )
            act.plan = std::make_shared< itmp::Plan >( plan_from_json( a.at( "plan" ) ) );
        g.actions.push_back( std::move( act ) );
    }
    const auto n = g.states.size();
    for ( const auto& e : field( j, "system_edges" ) )
    {
        missiongame::SystemEdge se{ field( e, "from" ).get< std::size_t >(), field( e, "to" ).get< std::size_t >(),
                                    field( e, "action" ).get< std::size_t >() };
        if ( se.from >= n || se.to >= n || se.action >= g.actions.size() )
            throw ArtifactError( "system edge out of range" );
        g.system_edges.push_back( se );
    }
    for ( const auto& e : field( j, "env_edges" ) )
    {
        missiongame::EnvEdge ee{ field( e, "from" ).get< std::size_t >(), field( e, "to" ).get< std::size_t >(),
                                 field( e, "name" ).get< std::string >() };
        if ( ee.from >= n || ee.to >= n )
            throw ArtifactError( "environment edge out of range" );
        g.env_edges.push_back( ee );
    }
    for ( const auto& e : field( j, "unknown_edges" ) )
        g.unknown_edges.emplace_back( e.at( 0 ).get< std::size_t >(), e.at( 1 ).get< std::size_t >() );
    g.candidates = field( j, "candidates" ).get< std::size_t >();
    return g;
}

json strategy_to_json( const missiongame::MissionGraph& g, const missiongame::WinningCondition& w,
                       const missiongame::MissionStrategy& s, const std::string& scenario )
{
    json j;
    j[ "schema_version" ] = artifact_schema_version;
    j[ "kind" ] = "strategy";
    j[ "scenario" ] = scenario;
    j[ "objective" ] = missiongame::objective_kind_name( w.kind );
    j[ "memory_size" ] = s.strategy.memory_size;
    j[ "initial_memory" ] = s.strategy.initial_memory;
    j[ "initial_states" ] = s.initial_states;
    json win = json::array();
    for ( std::size_t i = 0; i < s.winning.size(); ++i )
        if ( s.winning[ i ] )
            win.push_back( i );
    j[ "winning" ] = win;
    j[ "choice" ] = s.strategy.choice;
    j[ "next" ] = s.strategy.next;
    json rows = json::array();
    for ( const auto& r : missiongame::strategy_to_transducer( g, w, s ) )
        rows.push_back( { { "memory", r.memory },
                          { "state", r.state },
                          { "state_label", missiongame::to_string( g.states[ r.state ], g.config ) },
                          { "action", g.actions[ r.action ].name },
                          { "next_memory", r.next_memory },
                          { "target", r.target } } );
    j[ "transducer" ] = rows;
    return j;
}

missiongame::MissionStrategy strategy_from_json( const json& j, const missiongame::MissionGraph& g )
{
    check_version( j, "strategy" );
    missiongame::MissionStrategy s;
    s.strategy.memory_size = field( j, "memory_size" ).get< std::size_t >();
    s.strategy.initial_memory = field( j, "initial_memory" ).get< std::size_t >();
    s.initial_states = field( j, "initial_states" ).get< std::vector< std::size_t > >();
    s.strategy.choice = field( j, "choice" ).get< std::vector< std::vector< std::size_t > > >();
    s.strategy.next = field( j, "next" ).get< std::vector< std::vector< std::size_t > > >();
    s.winning.assign( g.states.size(), false );
    for ( const auto& i : field( j, "winning" ) )
    {
        auto k = i.get< std::size_t >();
        if ( k >= g.states.size() )
            throw ArtifactError( "winning state out of range" );
        s.winning[ k ] = true;
    }
    if ( s.strategy.choice.size() != s.strategy.memory_size || s.strategy.next.size() != s.strategy.memory_size )
        throw ArtifactError( "strategy tables do not match memory_size" );
    for ( std::size_t m = 0; m < s.strategy.memory_size; ++m )
        if ( s.strategy.choice[ m ].size() != g.states.size() || s.strategy.next[ m ].size() != g.states.size() )
            throw ArtifactError( "strategy tables do not match the graph; rerun `strategy`" );
    const auto arena = missiongame::to_arena( g );
    for ( std::size_t m = 0; m < s.strategy.memory_size; ++m )
        for ( std::size_t q = 0; q < g.states.size(); ++q )
        {
            if ( s.strategy.next[ m ][ q ] >= s.strategy.memory_size )
                throw ArtifactError( "strategy memory update out of range" );
            const auto& succ = arena.game.succ[ q ];
            if ( s.winning[ q ] && arena.game.owner[ q ] == missiongame::Player::System && !succ.empty() &&
                 s.strategy.choice[ m ][ q ] >= succ.size() )
                throw ArtifactError( "strategy choice out of range at state " + std::to_string( q ) );
        }
    for ( auto q : s.initial_states )
        if ( q >= g.states.size() )
            throw ArtifactError( "initial state out of range" );
    return s;
}

namespace
{

struct Frame
{
    double xmin, ymin, xmax, ymax, scale;

    [[nodiscard]] double X( double x ) const { return ( x - xmin ) * scale + 20; }
    [[nodiscard]] double Y( double y ) const { return ( ymax - y ) * scale + 20; }
};

std::string fmt( double v )
{
    char buf[ 32 ];
    std::snprintf( buf, sizeof buf, "%.2f", v );
    return buf;
}

std::string polygon( const Frame& f, const geometry::HPolytope& p, const std::string& style )
{
    std::string pts;
    for ( const auto& v : geometry::vertices( p ) )
        pts += fmt( f.X( to_double( v.x ) ) ) + "," + fmt( f.Y( to_double( v.y ) ) ) + " ";
    return "<polygon points=\"" + pts + "\" " + style + "/>\n";
}

} // namespace

std::string render_svg( const Scenario& s, const simkit::TraceRecord* trace, const geometry::Tunnel* tunnel )
{
    auto box = geometry::vertices( s.workspace.boundary );
    Frame f{ 1e300, 1e300, -1e300, -1e300, 80 };
    for ( const auto& v : box )
    {
        f.xmin = std::min( f.xmin, to_double( v.x ) );
        f.ymin = std::min( f.ymin, to_double( v.y ) );
        f.xmax = std::max( f.xmax, to_double( v.x ) );
        f.ymax = std::max( f.ymax, to_double( v.y ) );
    }
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt( ( f.xmax - f.xmin ) * f.scale + 40 )
        << "\" height=\"" << fmt( ( f.ymax - f.ymin ) * f.scale + 40 ) << "\">\n";
    out << "<title>" << s.name << "</title>\n";
    out << polygon( f, s.workspace.boundary, "fill=\"#fafafa\" stroke=\"#333\" stroke-width=\"2\"" );
    if ( tunnel )
        for ( const auto& p : tunnel->polytopes )
            if ( geometry::is_bounded( p ) )
                out << polygon( f, p, "fill=\"#4a90d9\" fill-opacity=\"0.08\" stroke=\"#4a90d9\" stroke-dasharray=\"4 3\"" );
    for ( const auto& c : s.cobstacles )
        out << polygon( f, c.inflated, "fill=\"none\" stroke=\"#c66\" stroke-dasharray=\"3 3\"" );
    for ( const auto& o : s.workspace.obstacles )
        out << polygon( f, o, "fill=\"#888\" stroke=\"#444\"" );
    for ( const auto& l : s.mission.locations )
    {
        const double x = f.X( to_double( l.x ) ), y = f.Y( to_double( l.y ) );
        out << "<circle cx=\"" << fmt( x ) << "\" cy=\"" << fmt( y ) << "\" r=\"4\" fill=\"#2a7\"/>\n";
        out << "<text x=\"" << fmt( x + 6 ) << "\" y=\"" << fmt( y - 6 ) << "\" font-size=\"12\">" << l.name << "</text>\n";
    }
    if ( trace && !trace->rows.empty() )
    {
        // Drive and override segments in different colors.
        auto path = [ & ]( auto pick, const std::string& style ) {
            std::string pts;
            for ( std::size_t i = 0; i < trace->rows.size(); i += 5 )
            {
                auto p = pick( trace->rows[ i ] );
                pts += fmt( f.X( p.x ) ) + "," + fmt( f.Y( p.y ) ) + " ";
            }
            out << "<polyline points=\"" << pts << "\" fill=\"none\" " << style << "/>\n";
        };
        path( []( const simkit::TraceRow& r ) { return r.s.position(); }, "stroke=\"#1f4e9c\" stroke-width=\"2\"" );
        for ( std::size_t k = 0; k < trace->obstacle_names.size(); ++k )
            path( [ k ]( const simkit::TraceRow& r ) { return r.obstacles[ k ]; },
                  "stroke=\"#d62\" stroke-width=\"1\" stroke-dasharray=\"2 2\"" );
        for ( const auto& r : trace->rows )
            if ( r.mode == safety::Mode::Override )
                out << "<circle cx=\"" << fmt( f.X( r.s.x ) ) << "\" cy=\"" << fmt( f.Y( r.s.y ) )
                    << "\" r=\"2\" fill=\"#e33\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace ritmp::io
