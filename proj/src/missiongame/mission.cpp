#include "ritmp/missiongame/mission.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace ritmp::missiongame
{

void validate_config( const MissionConfig& c )
{
    if ( c.robot_slots.empty() )
        throw std::invalid_argument( "mission needs at least one robot slot" );
    std::set< std::size_t > seen;
    for ( auto s : c.object_slots )
        if ( s >= c.locations.size() || !seen.insert( s ).second )
            throw std::invalid_argument( "object slots must be distinct location indices" );
    seen.clear();
    for ( auto s : c.robot_slots )
        if ( s >= c.locations.size() || !seen.insert( s ).second )
            throw std::invalid_argument( "robot slots must be distinct location indices" );
    if ( c.objects.size() > c.object_slots.size() )
        throw std::invalid_argument( "more objects than object slots" );
}

std::string to_string( const MissionState& m, const MissionConfig& c )
{
    std::string out = "robot=" + c.locations.at( m.robot ).name;
    for ( std::size_t o = 0; o < m.objects.size(); ++o )
        out += " " + c.objects.at( o ) + "=" + c.locations.at( m.objects[ o ] ).name;
    out += m.turn == EnvTurn ? " turn=env" : " turn=sys";
    return out;
}

std::uint64_t count_states( const MissionConfig& c )
{
    std::uint64_t placements = 1;
    for ( std::size_t i = 0; i < c.objects.size(); ++i )
        placements *= c.object_slots.size() - i;
    return 2 * c.robot_slots.size() * placements;
}

std::vector< MissionState > enumerate_states( const MissionConfig& c )
{
    validate_config( c );
    auto total = count_states( c );
    if ( total > c.max_states )
        throw StateCapExceeded( std::to_string( total ) + " mission states exceed the cap of " +
                                std::to_string( c.max_states ) );
    std::vector< std::vector< std::size_t > > placements;
    std::vector< std::size_t > current;
    std::vector< bool > used( c.object_slots.size(), false );
    auto rec = [ & ]( auto&& self ) -> void {
        if ( current.size() == c.objects.size() )
        {
            placements.push_back( current );
            return;
        }
        for ( std::size_t k = 0; k < c.object_slots.size(); ++k )
        {
            if ( used[ k ] )
                continue;
            used[ k ] = true;
            current.push_back( c.object_slots[ k ] );
            self( self );
            current.pop_back();
            used[ k ] = false;
        }
    };
    rec( rec );
    std::vector< MissionState > out;
    out.reserve( total );
    for ( auto r : c.robot_slots )
        for ( const auto& p : placements )
            for ( int turn : { EnvTurn, SysTurn } )
                out.push_back( { r, p, turn } );
    return out;
}

Predicate Predicate::truth( bool value )
{
    Predicate p;
    p._kind = value ? Kind::True : Kind::False;
    return p;
}

Predicate Predicate::object_in( std::size_t object, std::vector< std::size_t > locations )
{
    Predicate p;
    p._kind = Kind::ObjectIn;
    p._index = object;
    p._locations = std::move( locations );
    return p;
}

Predicate Predicate::robot_at( std::size_t location )
{
    Predicate p;
    p._kind = Kind::RobotAt;
    p._index = location;
    return p;
}

Predicate Predicate::turn( int sigma )
{
    Predicate p;
    p._kind = Kind::Turn;
    p._index = static_cast< std::size_t >( sigma );
    return p;
}

Predicate Predicate::negate( Predicate q )
{
    Predicate p;
    p._kind = Kind::Not;
    p._parts.push_back( std::move( q ) );
    return p;
}

Predicate Predicate::all( std::vector< Predicate > parts )
{
    Predicate p;
    p._kind = Kind::And;
    p._parts = std::move( parts );
    return p;
}

Predicate Predicate::any( std::vector< Predicate > parts )
{
    Predicate p;
    p._kind = Kind::Or;
    p._parts = std::move( parts );
    return p;
}

bool Predicate::eval( const MissionState& m ) const
{
    switch ( _kind )
    {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::ObjectIn:
        for ( auto l : _locations )
            if ( m.objects.at( _index ) == l )
                return true;
        return false;
    case Kind::RobotAt: return m.robot == _index;
    case Kind::Turn: return static_cast< std::size_t >( m.turn ) == _index;
    case Kind::Not: return !_parts[ 0 ].eval( m );
    case Kind::And:
        for ( const auto& p : _parts )
            if ( !p.eval( m ) )
                return false;
        return true;
    case Kind::Or:
        for ( const auto& p : _parts )
            if ( p.eval( m ) )
                return true;
        return false;
    }
    return false;
}

std::string Predicate::to_string( const MissionConfig& c ) const
{
    auto join = [ & ]( const char* op ) {
        std::string out = "(";
        for ( std::size_t i = 0; i < _parts.size(); ++i )
            out += ( i ? op : "" ) + _parts[ i ].to_string( c );
        return out + ")";
    };
    switch ( _kind )
    {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::ObjectIn:
    {
        std::string out = c.objects.at( _index ) + " in {";
        for ( std::size_t i = 0; i < _locations.size(); ++i )
            out += ( i ? ", " : "" ) + c.locations.at( _locations[ i ] ).name;
        return out + "}";
    }
    case Kind::RobotAt: return "robot at " + c.locations.at( _index ).name;
    case Kind::Turn: return _index == EnvTurn ? "turn = env" : "turn = sys";
    case Kind::Not: return "!" + _parts[ 0 ].to_string( c );
    case Kind::And: return join( " && " );
    case Kind::Or: return join( " || " );
    }
    return "?";
}

std::size_t MissionGraph::find( const MissionState& m ) const
{
    for ( std::size_t i = 0; i < states.size(); ++i )
        if ( states[ i ] == m )
            return i;
    throw std::out_of_range( "mission state not in the graph" );
}

namespace
{

std::map< std::pair< std::size_t, std::vector< std::size_t > >, std::size_t > index_by_valuation(
    const std::vector< MissionState >& states, int turn )
{
    std::map< std::pair< std::size_t, std::vector< std::size_t > >, std::size_t > idx;
    for ( std::size_t i = 0; i < states.size(); ++i )
        if ( states[ i ].turn == turn )
            idx[ { states[ i ].robot, states[ i ].objects } ] = i;
    return idx;
}

std::size_t moved_objects( const MissionState& a, const MissionState& b )
{
    std::size_t n = 0;
    for ( std::size_t o = 0; o < a.objects.size(); ++o )
        n += a.objects[ o ] != b.objects[ o ];
    return n;
}

std::string action_name( const MissionConfig& c, const MissionState& a, const MissionState& b )
{
    std::vector< std::string > parts;
    for ( std::size_t o = 0; o < a.objects.size(); ++o )
        if ( a.objects[ o ] != b.objects[ o ] )
            parts.push_back( "move " + c.objects[ o ] + " " + c.locations[ a.objects[ o ] ].name + "->" +
                             c.locations[ b.objects[ o ] ].name );
    if ( a.robot != b.robot )
        parts.push_back( "robot " + c.locations[ a.robot ].name + "->" + c.locations[ b.robot ].name );
    if ( parts.empty() )
        return "stay";
    std::string out;
    for ( std::size_t i = 0; i < parts.size(); ++i )
        out += ( i ? ", " : "" ) + parts[ i ];
    return out;
}

} // namespace

std::vector< EnvEdge > environment_edges( const MissionConfig& c, const std::vector< MissionState >& states,
                                          const EnvironmentModel& env )
{
    for ( const auto& r : env.rules )
        if ( r.object >= c.objects.size() || r.from >= c.locations.size() || r.to >= c.locations.size() )
            throw std::invalid_argument( "environment rule '" + r.name + "' references an unknown object or location" );
    auto sys = index_by_valuation( states, SysTurn );
    std::vector< EnvEdge > out;
    for ( std::size_t i = 0; i < states.size(); ++i )
    {
        const auto& m = states[ i ];
        if ( m.turn != EnvTurn )
            continue;
        for ( const auto& r : env.rules )
        {
            if ( m.objects[ r.object ] != r.from )
                continue;
            bool free = true;
            for ( auto l : m.objects )
                free = free && l != r.to;
            if ( !free )
                continue;
            auto objs = m.objects;
            objs[ r.object ] = r.to;
            auto it = sys.find( { m.robot, objs } );
            if ( it != sys.end() )
                out.push_back( { i, it->second, r.name } );
        }
        if ( env.may_idle )
            out.push_back( { i, sys.at( { m.robot, m.objects } ), "idle" } );
    }
    return out;
}

taskspec::Warehouse edge_task( const MissionConfig& c, const MissionState& from, const MissionState& to )
{
    auto w = taskspec::warehouse_actions( c.locations, c.objects );
    const auto& home = c.locations.at( from.robot );
    taskspec::set_initial( w, home.x, home.y, home.theta.value_or( Rational{ 0 } ), from.objects );
    taskspec::set_goal( w, to.robot, to.objects );
    return w;
}

MissionGraph synth_mission_graph( const MissionConfig& c, const EnvironmentModel& env, const geometry::Workspace& ws,
                                  const std::vector< geometry::CObstacle >& cobs, const SynthesisOptions& opt )
{
    MissionGraph g;
    g.config = c;
    g.states = enumerate_states( c );
    g.env_edges = environment_edges( c, g.states, env );

    struct Job
    {
        std::size_t from, to;
        itmp::ItmpResult result;
        std::uint64_t fingerprint = 0;
        bool valid = false;
    };
    std::vector< Job > jobs;
    for ( std::size_t i = 0; i < g.states.size(); ++i )
        for ( std::size_t j = 0; j < g.states.size(); ++j )
            if ( g.states[ i ].turn == SysTurn && g.states[ j ].turn == EnvTurn &&
                 moved_objects( g.states[ i ], g.states[ j ] ) <= c.max_moved_objects )
                jobs.push_back( { i, j, {}, 0, false } );
    g.candidates = jobs.size();

    std::atomic< std::size_t > next{ 0 };
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto worker = [ & ]() {
        for ( std::size_t k = next++; k < jobs.size(); k = next++ )
        {
            try
            {
                auto& job = jobs[ k ];
                itmp::PlanRequest req;
                req.workspace = ws;
                req.cobstacles = cobs;
                req.task = edge_task( c, g.states[ job.from ], g.states[ job.to ] ).task;
                req.K_max = opt.K_max;
                auto formula = itmp::plan_formula( req );
                job.fingerprint = ltlk::fingerprint( formula.phi, formula.task.universe );
                job.result = itmp::itmp( req, opt.solver );
                if ( job.result.plan )
                    job.valid = itmp::validate_plan( *job.result.plan, req ).ok;
            }
            catch ( ... )
            {
                std::lock_guard lock{ failure_lock };
                if ( !failure )
                    failure = std::current_exception();
            }
        }
    };
    std::vector< std::thread > pool;
    for ( std::size_t t = 1; t < std::max< std::size_t >( opt.jobs, 1 ); ++t )
        pool.emplace_back( worker );
    worker();
    for ( auto& t : pool )
        t.join();
    if ( failure )
        std::rethrow_exception( failure );

    for ( auto& job : jobs )
    {
        if ( job.result.status == encoder::Status::Unknown )
            g.unknown_edges.emplace_back( job.from, job.to );
        if ( !job.result.plan )
            continue;
        SymbolicAction a;
        a.id = g.actions.size();
        a.name = action_name( c, g.states[ job.from ], g.states[ job.to ] );
        a.fingerprint = job.fingerprint;
        a.plan = std::make_shared< const itmp::Plan >( std::move( *job.result.plan ) );
        a.plan_valid = job.valid;
        g.system_edges.push_back( { job.from, job.to, a.id } );
        g.actions.push_back( std::move( a ) );
    }
    return g;
}

Arena to_arena( const MissionGraph& g )
{
    Arena a;
    const std::size_t n = g.states.size();
    a.game.owner.resize( n );
    a.game.succ.resize( n );
    a.edge_of.resize( n );
    for ( std::size_t s = 0; s < n; ++s )
        a.game.owner[ s ] = g.states[ s ].turn == SysTurn ? Player::System : Player::Environment;
    for ( std::size_t e = 0; e < g.system_edges.size(); ++e )
    {
        a.game.succ[ g.system_edges[ e ].from ].push_back( g.system_edges[ e ].to );
        a.edge_of[ g.system_edges[ e ].from ].push_back( e );
    }
    for ( std::size_t e = 0; e < g.env_edges.size(); ++e )
    {
        a.game.succ[ g.env_edges[ e ].from ].push_back( g.env_edges[ e ].to );
        a.edge_of[ g.env_edges[ e ].from ].push_back( g.system_edges.size() + e );
    }
    return a;
}

Objective to_objective( const MissionGraph& g, const WinningCondition& w )
{
    auto mask = [ & ]( const Predicate& p ) {
        StateSet out( g.states.size() );
        for ( std::size_t s = 0; s < g.states.size(); ++s )
            out[ s ] = p.eval( g.states[ s ] );
        return out;
    };
    Objective o;
    o.kind = w.kind;
    o.safe = mask( w.safe );
    for ( const auto& p : w.goals )
        o.goals.push_back( mask( p ) );
    return o;
}

std::optional< MissionStrategy > solve_game( const MissionGraph& g, const WinningCondition& w )
{
    auto arena = to_arena( g );
    auto sol = solve( arena.game, to_objective( g, w ) );
    MissionStrategy out;
    out.strategy = std::move( sol.strategy );
    out.winning = std::move( sol.winning );
    for ( std::size_t s = 0; s < g.states.size(); ++s )
        if ( w.init.eval( g.states[ s ] ) )
        {
            if ( !out.winning[ s ] )
                return std::nullopt;
            out.initial_states.push_back( s );
        }
    return out;
}

std::vector< TransducerRow > strategy_to_transducer( const MissionGraph& g, const WinningCondition&,
                                                     const MissionStrategy& s )
{
    auto arena = to_arena( g );
    const auto& game = arena.game;
    std::set< std::pair< std::size_t, std::size_t > > seen;
    std::deque< std::pair< std::size_t, std::size_t > > queue;
    for ( auto s0 : s.initial_states )
        if ( seen.insert( { s.strategy.initial_memory, s0 } ).second )
            queue.emplace_back( s.strategy.initial_memory, s0 );
    std::vector< TransducerRow > rows;
    while ( !queue.empty() )
    {
        auto [ m, st ] = queue.front();
        queue.pop_front();
        if ( game.succ[ st ].empty() )
            continue;
        const auto nm = s.strategy.update( m, st );
        std::vector< std::size_t > moves;
        if ( game.owner[ st ] == Player::System )
        {
            auto k = s.strategy.move( m, st );
            moves.push_back( k );
            rows.push_back( { m, st, g.system_edges[ arena.edge_of[ st ][ k ] ].action, nm, game.succ[ st ][ k ] } );
        }
        else
            for ( std::size_t k = 0; k < game.succ[ st ].size(); ++k )
                moves.push_back( k );
        for ( auto k : moves )
            if ( seen.insert( { nm, game.succ[ st ][ k ] } ).second )
                queue.emplace_back( nm, game.succ[ st ][ k ] );
    }
    std::sort( rows.begin(), rows.end(), []( const auto& a, const auto& b ) {
        return std::pair{ a.memory, a.state } < std::pair{ b.memory, b.state };
    } );
    return rows;
}

OutcomeReport check_outcomes( const MissionGraph& g, const WinningCondition& w, const MissionStrategy& s,
                              const EnvPolicy& env, std::size_t start, std::size_t max_steps )
{
    auto arena = to_arena( g );
    OutcomeReport r;
    r.playout = play( arena.game, to_objective( g, w ), s.strategy, env, start, max_steps );
    const auto& states = r.playout.states;
    for ( std::size_t i = 0; i + 1 < states.size(); ++i )
    {
        auto st = states[ i ];
        if ( arena.game.owner[ st ] != Player::System )
            continue;
        auto k = s.strategy.move( r.playout.memory[ i ], st );
        const auto& action = g.actions[ g.system_edges[ arena.edge_of[ st ][ k ] ].action ];
        r.actions_taken.push_back( action.id );
        r.plans_valid = r.plans_valid && action.plan_valid;
    }
    return r;
}

std::string to_dot( const MissionGraph& g )
{
    std::ostringstream out;
    out << "digraph mission {\n";
    for ( std::size_t s = 0; s < g.states.size(); ++s )
        out << "  m" << s << " [label=\"" << to_string( g.states[ s ], g.config ) << "\""
            << ( g.states[ s ].turn == SysTurn ? ", shape=box" : "" ) << "];\n";
    for ( const auto& e : g.system_edges )
        out << "  m" << e.from << " -> m" << e.to << " [label=\"" << g.actions[ e.action ].name << "\"];\n";
    for ( const auto& e : g.env_edges )
        out << "  m" << e.from << " -> m" << e.to << " [label=\"" << e.name << "\", style=dashed];\n";
    out << "}\n";
    return out.str();
}

} // namespace ritmp::missiongame
