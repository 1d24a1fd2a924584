#include "ritmp/io/scenario.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ritmp::io
{

using nlohmann::json;

namespace
{

std::string at( const std::string& ptr, const std::string& key ) { return ptr + "/" + key; }
std::string at( const std::string& ptr, std::size_t i ) { return ptr + "/" + std::to_string( i ); }

const json& need( const json& j, const std::string& key, const std::string& ptr )
{
    if ( !j.is_object() )
        throw ScenarioError( ptr, "expected an object" );
    auto it = j.find( key );
    if ( it == j.end() )
        throw ScenarioError( at( ptr, key ), "required field missing" );
    return *it;
}

const json* maybe( const json& j, const std::string& key )
{
    auto it = j.find( key );
    return it == j.end() ? nullptr : &*it;
}

const json& need_array( const json& j, const std::string& ptr )
{
    if ( !j.is_array() )
        throw ScenarioError( ptr, "expected an array" );
    return j;
}

Rational rational( const json& j, const std::string& ptr )
{
    try
    {
        if ( j.is_string() )
            return parse_rational( j.get< std::string >() );
        if ( j.is_number_integer() )
            return Rational( j.dump() );
        if ( j.is_number() )
            return parse_rational( j.dump() );
    }
    catch ( const std::exception& e )
    {
        throw ScenarioError( ptr, std::string( "bad number: " ) + e.what() );
    }
    throw ScenarioError( ptr, "expected a number or a decimal string" );
}

double real( const json& j, const std::string& ptr ) { return to_double( rational( j, ptr ) ); }

std::string text( const json& j, const std::string& ptr )
{
    if ( !j.is_string() )
        throw ScenarioError( ptr, "expected a string" );
    return j.get< std::string >();
}

std::size_t count( const json& j, const std::string& ptr )
{
    if ( !j.is_number_unsigned() && !( j.is_number_integer() && j.get< long long >() >= 0 ) )
        throw ScenarioError( ptr, "expected a non-negative integer" );
    return j.get< std::size_t >();
}

// {"box": [xmin, ymin, xmax, ymax]} or {"facets": [[hx, hy, c], ...]} or {"vertices": [[x, y], ...]}.
geometry::HPolytope region( const json& j, const std::string& ptr )
{
    if ( auto b = maybe( j, "box" ) )
    {
        need_array( *b, at( ptr, "box" ) );
        if ( b->size() != 4 )
            throw ScenarioError( at( ptr, "box" ), "expected [xmin, ymin, xmax, ymax]" );
        Rational v[ 4 ];
        for ( std::size_t i = 0; i < 4; ++i )
            v[ i ] = rational( ( *b )[ i ], at( at( ptr, "box" ), i ) );
        if ( !( v[ 0 ] < v[ 2 ] ) || !( v[ 1 ] < v[ 3 ] ) )
            throw ScenarioError( at( ptr, "box" ), "empty box" );
        return geometry::box( v[ 0 ], v[ 1 ], v[ 2 ], v[ 3 ] );
    }
    if ( auto f = maybe( j, "facets" ) )
    {
        const auto p = at( ptr, "facets" );
        std::vector< geometry::Facet > rows;
        for ( std::size_t i = 0; i < need_array( *f, p ).size(); ++i )
        {
            const auto& r = ( *f )[ i ];
            if ( !r.is_array() || r.size() != 3 )
                throw ScenarioError( at( p, i ), "expected [hx, hy, c]" );
            rows.push_back( { rational( r[ 0 ], at( at( p, i ), 0 ) ), rational( r[ 1 ], at( at( p, i ), 1 ) ),
                              rational( r[ 2 ], at( at( p, i ), 2 ) ) } );
        }
        return geometry::HPolytope( rows );
    }
    if ( auto v = maybe( j, "vertices" ) )
    {
        const auto p = at( ptr, "vertices" );
        std::vector< geometry::Point > pts;
        for ( std::size_t i = 0; i < need_array( *v, p ).size(); ++i )
        {
            const auto& r = ( *v )[ i ];
            if ( !r.is_array() || r.size() != 2 )
                throw ScenarioError( at( p, i ), "expected [x, y]" );
            pts.push_back( { rational( r[ 0 ], at( at( p, i ), 0 ) ), rational( r[ 1 ], at( at( p, i ), 1 ) ) } );
        }
        return geometry::from_vertices( geometry::convex_hull( pts ) );
    }
    throw ScenarioError( ptr, "expected one of box, facets, vertices" );
}

simkit::Vec2 point( const json& j, const std::string& ptr )
{
    if ( !j.is_array() || j.size() != 2 )
        throw ScenarioError( ptr, "expected [x, y]" );
    return { real( j[ 0 ], at( ptr, 0 ) ), real( j[ 1 ], at( ptr, 1 ) ) };
}

std::size_t location_ref( const json& j, const missiongame::MissionConfig& c, const std::string& ptr )
{
    const auto name = text( j, ptr );
    for ( std::size_t i = 0; i < c.locations.size(); ++i )
        if ( c.locations[ i ].name == name )
            return i;
    throw ScenarioError( ptr, "dangling reference: no location named '" + name + "'" );
}

std::size_t object_ref( const json& j, const missiongame::MissionConfig& c, const std::string& ptr )
{
    const auto name = text( j, ptr );
    for ( std::size_t i = 0; i < c.objects.size(); ++i )
        if ( c.objects[ i ] == name )
            return i;
    throw ScenarioError( ptr, "dangling reference: no object named '" + name + "'" );
}

bool strictly_inside( const geometry::HPolytope& p, const geometry::Point& q )
{
    for ( const auto& f : p.facets() )
        if ( !( f.eval( q ) < f.c ) )
            return false;
    return true;
}

} // namespace

missiongame::Predicate parse_predicate( const json& j, const missiongame::MissionConfig& c, const std::string& ptr )
{
    using missiongame::Predicate;
    if ( j.is_boolean() )
        return Predicate::truth( j.get< bool >() );
    if ( !j.is_object() || j.size() != 1 )
        throw ScenarioError( ptr, "expected true, false or a single-key predicate object" );
    const auto& [ key, body ] = *j.items().begin();
    const auto p = at( ptr, key );
    if ( key == "object_in" )
    {
        auto o = object_ref( need( body, "object", p ), c, at( p, "object" ) );
        const auto& ls = need_array( need( body, "locations", p ), at( p, "locations" ) );
        std::vector< std::size_t > locs;
        for ( std::size_t i = 0; i < ls.size(); ++i )
            locs.push_back( location_ref( ls[ i ], c, at( at( p, "locations" ), i ) ) );
        return Predicate::object_in( o, locs );
    }
    if ( key == "each_object_in" )
    {
        std::vector< std::size_t > locs;
        for ( std::size_t i = 0; i < need_array( body, p ).size(); ++i )
            locs.push_back( location_ref( body[ i ], c, at( p, i ) ) );
        std::vector< Predicate > parts;
        for ( std::size_t o = 0; o < c.objects.size(); ++o )
            parts.push_back( Predicate::object_in( o, locs ) );
        return Predicate::all( parts );
    }
    if ( key == "robot_at" )
        return Predicate::robot_at( location_ref( body, c, p ) );
    if ( key == "turn" )
    {
        auto t = text( body, p );
        if ( t == "env" )
            return Predicate::turn( missiongame::EnvTurn );
        if ( t == "sys" )
            return Predicate::turn( missiongame::SysTurn );
        throw ScenarioError( p, "turn must be \"env\" or \"sys\"" );
    }
    if ( key == "not" )
        return Predicate::negate( parse_predicate( body, c, p ) );
    if ( key == "all" || key == "any" )
    {
        std::vector< Predicate > parts;
        for ( std::size_t i = 0; i < need_array( body, p ).size(); ++i )
            parts.push_back( parse_predicate( body[ i ], c, at( p, i ) ) );
        return key == "all" ? Predicate::all( parts ) : Predicate::any( parts );
    }
    throw ScenarioError( p, "unknown predicate '" + key + "'" );
}

Scenario parse_scenario( const json& j )
{
    Scenario s;
    const std::string root;
    if ( !j.is_object() )
        throw ScenarioError( root, "expected an object" );
    const auto version = count( need( j, "schema_version", root ), "/schema_version" );
    if ( version != scenario_schema_version )
        throw ScenarioError( "/schema_version", "unsupported version " + std::to_string( version ) );
    s.name = text( need( j, "name", root ), "/name" );
    if ( s.name.empty() || s.name.find_first_of( "/\\ " ) != std::string::npos )
        throw ScenarioError( "/name", "must be a non-empty word usable as a directory name" );

    s.workspace.boundary = region( need( j, "workspace", root ), "/workspace" );
    if ( auto obs = maybe( j, "obstacles" ) )
        for ( std::size_t i = 0; i < need_array( *obs, "/obstacles" ).size(); ++i )
        {
            const auto p = at( "/obstacles", i );
            s.workspace.obstacles.push_back( region( ( *obs )[ i ], p ) );
            auto n = maybe( ( *obs )[ i ], "name" );
            s.obstacle_names.push_back( n ? text( *n, at( p, "name" ) ) : "obstacle" + std::to_string( i ) );
        }
    try
    {
        geometry::validate_workspace( s.workspace );
    }
    catch ( const std::exception& e )
    {
        throw ScenarioError( "/workspace", e.what() );
    }

    // Locations and objects first: everything else refers to them by name.
    const auto& locs = need_array( need( j, "locations", root ), "/locations" );
    std::set< std::string > names;
    for ( std::size_t i = 0; i < locs.size(); ++i )
    {
        const auto p = at( "/locations", i );
        taskspec::NamedLocation l;
        l.name = text( need( locs[ i ], "name", p ), at( p, "name" ) );
        if ( !names.insert( l.name ).second )
            throw ScenarioError( at( p, "name" ), "duplicate location '" + l.name + "'" );
        l.x = rational( need( locs[ i ], "x", p ), at( p, "x" ) );
        l.y = rational( need( locs[ i ], "y", p ), at( p, "y" ) );
        if ( auto th = maybe( locs[ i ], "theta" ) )
            l.theta = rational( *th, at( p, "theta" ) );
        s.mission.locations.push_back( l );
    }
    const auto& objs = need_array( need( j, "objects", root ), "/objects" );
    for ( std::size_t i = 0; i < objs.size(); ++i )
    {
        const auto p = at( "/objects", i );
        auto name = text( need( objs[ i ], "name", p ), at( p, "name" ) );
        for ( const auto& o : s.mission.objects )
            if ( o == name )
                throw ScenarioError( at( p, "name" ), "duplicate object '" + name + "'" );
        s.mission.objects.push_back( name );
    }
    for ( std::size_t i = 0; i < objs.size(); ++i )
    {
        const auto p = at( "/objects", i );
        auto loc = location_ref( need( objs[ i ], "at", p ), s.mission, at( p, "at" ) );
        for ( std::size_t k = 0; k < s.placement.size(); ++k )
            if ( s.placement[ k ] == loc )
                throw ScenarioError( at( p, "at" ), "location '" + s.mission.locations[ loc ].name +
                                                        "' already holds object '" + s.mission.objects[ k ] + "'" );
        s.placement.push_back( loc );
    }
    const auto& slots = need_array( need( j, "object_slots", root ), "/object_slots" );
    for ( std::size_t i = 0; i < slots.size(); ++i )
        s.mission.object_slots.push_back( location_ref( slots[ i ], s.mission, at( "/object_slots", i ) ) );
    for ( std::size_t o = 0; o < s.placement.size(); ++o )
        if ( std::find( s.mission.object_slots.begin(), s.mission.object_slots.end(), s.placement[ o ] ) ==
             s.mission.object_slots.end() )
            throw ScenarioError( at( at( "/objects", o ), "at" ), "initial location is not an object slot" );
    if ( auto mm = maybe( j, "max_moved_objects" ) )
        s.mission.max_moved_objects = count( *mm, "/max_moved_objects" );
    if ( auto ms = maybe( j, "max_states" ) )
        s.mission.max_states = count( *ms, "/max_states" );

    // Robot.
    const auto& robot = need( j, "robot", root );
    s.robot_radius = rational( need( robot, "radius", "/robot" ), "/robot/radius" );
    if ( s.robot_radius < 0 )
        throw ScenarioError( "/robot/radius", "must be non-negative" );
    s.home = location_ref( need( robot, "home", "/robot" ), s.mission, "/robot/home" );
    s.mission.robot_slots = { s.home };
    const auto& home = s.mission.locations[ s.home ];
    s.start = { to_double( home.x ), to_double( home.y ), home.theta ? to_double( *home.theta ) : 0.0, 0, 0 };
    geometry::Point start_exact{ home.x, home.y };
    if ( auto st = maybe( robot, "start" ) )
    {
        const auto p = std::string( "/robot/start" );
        start_exact = { rational( need( *st, "x", p ), p + "/x" ), rational( need( *st, "y", p ), p + "/y" ) };
        s.start.x = to_double( start_exact.x );
        s.start.y = to_double( start_exact.y );
        if ( auto th = maybe( *st, "theta" ) )
            s.start.theta = simkit::wrap_angle( real( *th, p + "/theta" ) );
    }
    auto& sp = s.loop.safety;
    if ( auto sf = maybe( robot, "safety" ) )
    {
        const std::string p = "/robot/safety";
        if ( auto v = maybe( *sf, "A" ) )
            sp.A = real( *v, p + "/A" );
        if ( auto v = maybe( *sf, "B" ) )
            sp.B = real( *v, p + "/B" );
        if ( auto v = maybe( *sf, "eps" ) )
            sp.eps = real( *v, p + "/eps" );
        if ( auto v = maybe( *sf, "V_obs" ) )
            sp.V_obs = real( *v, p + "/V_obs" );
        if ( auto v = maybe( *sf, "D_s" ) )
            sp.D_s = real( *v, p + "/D_s" );
    }
    auto& dw = s.loop.dwa;
    if ( auto v = maybe( robot, "alpha_max" ) )
        dw.alpha_max = real( *v, "/robot/alpha_max" );
    if ( auto v = maybe( robot, "v_max" ) )
        dw.v_max = real( *v, "/robot/v_max" );
    if ( auto v = maybe( robot, "omega_max" ) )
        dw.omega_max = real( *v, "/robot/omega_max" );
    if ( auto v = maybe( j, "dt" ) )
        s.loop.dt = real( *v, "/dt" );
    if ( auto v = maybe( robot, "sensor_range" ) )
        s.loop.sensor_range = real( *v, "/robot/sensor_range" );
    dw.A = sp.A;
    dw.B = sp.B;
    dw.D_s = sp.D_s;
    dw.dt = s.loop.dt;
    try
    {
        s.loop.validate();
    }
    catch ( const std::exception& e )
    {
        throw ScenarioError( "/robot/safety", e.what() );
    }

    s.cobstacles = geometry::c_obstacles( s.workspace, s.robot_radius );
    if ( !s.workspace.boundary.contains( start_exact ) )
        throw ScenarioError( "/robot", "robot start lies outside the workspace" );
    for ( std::size_t i = 0; i < s.cobstacles.size(); ++i )
        if ( strictly_inside( s.cobstacles[ i ].inflated, start_exact ) )
            throw ScenarioError( "/robot", "robot start lies inside C-obstacle " + std::to_string( i ) + " ('" +
                                               s.obstacle_names[ i ] + "')" );
    for ( std::size_t l = 0; l < s.mission.locations.size(); ++l )
    {
        const auto& loc = s.mission.locations[ l ];
        geometry::Point q{ loc.x, loc.y };
        if ( !s.workspace.boundary.contains( q ) )
            throw ScenarioError( at( "/locations", l ), "location '" + loc.name + "' lies outside the workspace" );
        for ( std::size_t i = 0; i < s.cobstacles.size(); ++i )
            if ( strictly_inside( s.cobstacles[ i ].inflated, q ) )
                throw ScenarioError( at( "/locations", l ), "location '" + loc.name + "' lies inside C-obstacle " +
                                                                std::to_string( i ) );
    }
    try
    {
        missiongame::validate_config( s.mission );
    }
    catch ( const std::exception& e )
    {
        throw ScenarioError( "/object_slots", e.what() );
    }

    // Environment.
    if ( auto env = maybe( j, "environment" ) )
    {
        const std::string p = "/environment";
        if ( auto rules = maybe( *env, "rules" ) )
            for ( std::size_t i = 0; i < need_array( *rules, p + "/rules" ).size(); ++i )
            {
                const auto rp = at( p + "/rules", i );
                const auto& r = ( *rules )[ i ];
                missiongame::EnvRule rule;
                rule.name = text( need( r, "name", rp ), at( rp, "name" ) );
                rule.object = object_ref( need( r, "object", rp ), s.mission, at( rp, "object" ) );
                rule.from = location_ref( need( r, "from", rp ), s.mission, at( rp, "from" ) );
                rule.to = location_ref( need( r, "to", rp ), s.mission, at( rp, "to" ) );
                s.env.rules.push_back( rule );
            }
        if ( auto idle = maybe( *env, "may_idle" ) )
        {
            if ( !idle->is_boolean() )
                throw ScenarioError( p + "/may_idle", "expected a boolean" );
            s.env.may_idle = idle->get< bool >();
        }
        if ( auto script = maybe( *env, "script" ) )
            for ( std::size_t i = 0; i < need_array( *script, p + "/script" ).size(); ++i )
            {
                auto name = text( ( *script )[ i ], at( p + "/script", i ) );
                bool known = name == "idle" && s.env.may_idle;
                for ( const auto& r : s.env.rules )
                    known = known || r.name == name;
                if ( !known )
                    throw ScenarioError( at( p + "/script", i ), "dangling reference: no environment move '" + name + "'" );
                s.env_script.push_back( name );
            }
    }

    if ( auto mv = maybe( j, "moving_obstacles" ) )
        for ( std::size_t i = 0; i < need_array( *mv, "/moving_obstacles" ).size(); ++i )
        {
            const auto p = at( "/moving_obstacles", i );
            const auto& o = ( *mv )[ i ];
            simkit::ObstacleModel m;
            m.name = text( need( o, "name", p ), at( p, "name" ) );
            try
            {
                m.policy = simkit::parse_obstacle_policy( text( need( o, "policy", p ), at( p, "policy" ) ) );
            }
            catch ( const std::invalid_argument& e )
            {
                throw ScenarioError( at( p, "policy" ), e.what() );
            }
            m.position = point( need( o, "start", p ), at( p, "start" ) );
            m.radius = real( need( o, "radius", p ), at( p, "radius" ) );
            m.speed = sp.V_obs;
            if ( auto v = maybe( o, "speed" ) )
                m.speed = real( *v, at( p, "speed" ) );
            if ( m.speed < 0 || m.speed > sp.V_obs )
                throw ScenarioError( at( p, "speed" ), "speed must lie in [0, V_obs]" );
            if ( auto w = maybe( o, "waypoints" ) )
                for ( std::size_t k = 0; k < need_array( *w, at( p, "waypoints" ) ).size(); ++k )
                    m.waypoints.push_back( point( ( *w )[ k ], at( at( p, "waypoints" ), k ) ) );
            if ( auto sc = maybe( o, "script" ) )
                for ( std::size_t k = 0; k < need_array( *sc, at( p, "script" ) ).size(); ++k )
                {
                    const auto& row = ( *sc )[ k ];
                    const auto rp = at( at( p, "script" ), k );
                    if ( !row.is_array() || row.size() != 3 )
                        throw ScenarioError( rp, "expected [t, x, y]" );
                    simkit::ScriptPoint sp_{ real( row[ 0 ], at( rp, 0 ) ), real( row[ 1 ], at( rp, 1 ) ),
                                             real( row[ 2 ], at( rp, 2 ) ) };
                    if ( !m.script.empty() && sp_.t < m.script.back().t )
                        throw ScenarioError( at( rp, 0 ), "script times must not decrease" );
                    m.script.push_back( sp_ );
                }
            if ( m.policy == simkit::ObstaclePolicy::WaypointLoop && m.waypoints.empty() )
                throw ScenarioError( p, "waypoint-loop needs waypoints" );
            if ( m.policy == simkit::ObstaclePolicy::Scripted && m.script.empty() )
                throw ScenarioError( p, "scripted needs a script" );
            s.moving.push_back( m );
        }

    // Mission.
    const auto& mission = need( j, "mission", root );
    const std::string mp = "/mission";
    if ( auto init = maybe( mission, "init" ) )
        s.condition.init = parse_predicate( *init, s.mission, mp + "/init" );
    else
    {
        std::vector< missiongame::Predicate > parts;
        for ( std::size_t o = 0; o < s.placement.size(); ++o )
            parts.push_back( missiongame::Predicate::object_in( o, { s.placement[ o ] } ) );
        parts.push_back( missiongame::Predicate::turn( missiongame::EnvTurn ) );
        s.condition.init = missiongame::Predicate::all( parts );
    }
    try
    {
        s.condition.kind = missiongame::parse_objective_kind( text( need( mission, "objective", mp ), mp + "/objective" ) );
    }
    catch ( const missiongame::UnsupportedObjective& e )
    {
        throw ScenarioError( mp + "/objective", e.what() );
    }
    s.condition.safe = missiongame::Predicate::truth( true );
    if ( auto safe = maybe( mission, "safe" ) )
        s.condition.safe = parse_predicate( *safe, s.mission, mp + "/safe" );
    if ( auto goals = maybe( mission, "goals" ) )
        for ( std::size_t i = 0; i < need_array( *goals, mp + "/goals" ).size(); ++i )
            s.condition.goals.push_back( parse_predicate( ( *goals )[ i ], s.mission, at( mp + "/goals", i ) ) );
    if ( s.condition.kind != missiongame::ObjectiveKind::Safety && s.condition.goals.empty() )
        throw ScenarioError( mp + "/goals", "objective needs at least one goal" );

    s.solver = encoder::SolverConfig::from_environment();
    if ( auto sv = maybe( j, "solver" ) )
    {
        if ( auto t = maybe( *sv, "timeout_s" ) )
            s.solver.timeout_s = real( *t, "/solver/timeout_s" );
        // LTLK_SOLVER_CMD, when set, wins over the file.
        if ( !std::getenv( "LTLK_SOLVER_CMD" ) )
        {
            if ( auto c = maybe( *sv, "cmd" ) )
                s.solver.cmd = text( *c, "/solver/cmd" );
            if ( auto a = maybe( *sv, "args" ) )
            {
                s.solver.args.clear();
                for ( std::size_t i = 0; i < need_array( *a, "/solver/args" ).size(); ++i )
                    s.solver.args.push_back( text( ( *a )[ i ], at( "/solver/args", i ) ) );
            }
        }
    }
    if ( auto k = maybe( j, "K_max" ) )
        s.K_max = count( *k, "/K_max" );
    if ( s.K_max == 0 )
        throw ScenarioError( "/K_max", "must be positive" );
    if ( auto v = maybe( j, "seed" ) )
        s.seed = count( *v, "/seed" );
    if ( auto v = maybe( j, "max_t" ) )
        s.max_t = real( *v, "/max_t" );
    return s;
}

Scenario load_scenario( const std::string& path )
{
    std::ifstream in( path );
    if ( !in )
        throw ScenarioError( "", "cannot open '" + path + "'" );
    json j;
    try
    {
        j = json::parse( in );
    }
    catch ( const json::parse_error& e )
    {
        throw ScenarioError( "", std::string( "invalid JSON: " ) + e.what() );
    }
    return parse_scenario( j );
}

missiongame::SynthesisOptions Scenario::synthesis( std::size_t jobs ) const
{
    missiongame::SynthesisOptions o;
    o.K_max = K_max;
    o.jobs = jobs;
    o.solver = solver;
    return o;
}

simkit::EpisodeConfig Scenario::episode() const
{
    simkit::EpisodeConfig c;
    c.loop = loop;
    c.obstacles = moving;
    c.start_pose = start;
    c.env_script = env_script;
    c.max_t = max_t;
    c.seed = seed;
    return c;
}

missiongame::MissionState Scenario::initial_state() const { return { home, placement, missiongame::EnvTurn }; }

} // namespace ritmp::io
