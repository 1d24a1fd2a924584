#include "ritmp/simkit/episode.hpp"

#include "ritmp/simkit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ritmp::simkit
{

namespace
{

std::string num( double x )
{
    char buf[ 32 ];
    std::snprintf( buf, sizeof buf, "%.10g", x );
    return buf;
}

std::vector< std::string > split( const std::string& line )
{
    std::vector< std::string > out;
    std::string cur;
    for ( char c : line )
    {
        if ( c == ',' )
        {
            out.push_back( cur );
            cur.clear();
        }
        else if ( c != '\r' )
            cur += c;
    }
    out.push_back( cur );
    return out;
}

} // namespace

void write_csv( const TraceRecord& trace, std::ostream& out )
{
    out << "t,px,py,theta,v,omega,a,alpha,mode,step,action";
    for ( std::size_t i = 1; i <= trace.obstacle_names.size(); ++i )
        out << ",obst" << i << "x,obst" << i << "y";
    out << '\n';
    for ( const auto& r : trace.rows )
    {
        out << num( r.t ) << ',' << num( r.s.x ) << ',' << num( r.s.y ) << ',' << num( r.s.theta ) << ','
            << num( r.s.v ) << ',' << num( r.s.omega ) << ',' << num( r.u.a ) << ',' << num( r.u.alpha ) << ','
            << safety::mode_name( r.mode ) << ',' << r.step << ',' << r.action;
        for ( const auto& o : r.obstacles )
            out << ',' << num( o.x ) << ',' << num( o.y );
        out << '\n';
    }
}

TraceRecord read_csv( std::istream& in )
{
    TraceRecord tr;
    std::string line;
    if ( !std::getline( in, line ) )
        throw std::runtime_error( "trace: empty input" );
    auto head = split( line );
    if ( head.size() < 11 || head[ 0 ] != "t" || head[ 10 ] != "action" || ( head.size() - 11 ) % 2 != 0 )
        throw std::runtime_error( "trace line 1: unexpected header" );
    const std::size_t nobs = ( head.size() - 11 ) / 2;
    for ( std::size_t i = 0; i < nobs; ++i )
        tr.obstacle_names.push_back( "obst" + std::to_string( i + 1 ) );
    std::size_t lineno = 1;
    while ( std::getline( in, line ) )
    {
        ++lineno;
        if ( line.empty() )
            continue;
        auto f = split( line );
        if ( f.size() != head.size() )
            throw std::runtime_error( "trace line " + std::to_string( lineno ) + ": expected " +
                                      std::to_string( head.size() ) + " fields" );
        try
        {
            TraceRow r;
            r.t = std::stod( f[ 0 ] );
            r.s = { std::stod( f[ 1 ] ), std::stod( f[ 2 ] ), std::stod( f[ 3 ] ), std::stod( f[ 4 ] ),
                    std::stod( f[ 5 ] ) };
            r.u = { std::stod( f[ 6 ] ), std::stod( f[ 7 ] ) };
            if ( f[ 8 ] == "drive" )
                r.mode = safety::Mode::Drive;
            else if ( f[ 8 ] == "override" )
                r.mode = safety::Mode::Override;
            else
                throw std::invalid_argument( "mode" );
            r.step = std::stoul( f[ 9 ] );
            r.action = f[ 10 ];
            for ( std::size_t i = 0; i < nobs; ++i )
                r.obstacles.push_back( { std::stod( f[ 11 + 2 * i ] ), std::stod( f[ 12 + 2 * i ] ) } );
            tr.rows.push_back( std::move( r ) );
        }
        catch ( const std::invalid_argument& )
        {
            throw std::runtime_error( "trace line " + std::to_string( lineno ) + ": malformed field" );
        }
        catch ( const std::out_of_range& )
        {
            throw std::runtime_error( "trace line " + std::to_string( lineno ) + ": value out of range" );
        }
    }
    if ( tr.rows.size() >= 2 )
        tr.dt = tr.rows[ 1 ].t - tr.rows[ 0 ].t;
    return tr;
}

double nonholonomic_residual( const TraceRecord& trace )
{
    double worst = 0;
    const auto& r = trace.rows;
    for ( std::size_t i = 1; i + 1 < r.size(); ++i )
    {
        const double h = r[ i + 1 ].t - r[ i - 1 ].t;
        const double xd = ( r[ i + 1 ].s.x - r[ i - 1 ].s.x ) / h;
        const double yd = ( r[ i + 1 ].s.y - r[ i - 1 ].s.y ) / h;
        const double th = r[ i ].s.theta;
        worst = std::max( worst, std::abs( -xd * std::sin( th ) + yd * std::cos( th ) ) );
    }
    return worst;
}

void LoopParams::validate() const
{
    safety.validate();
    dwa.validate();
    if ( !( dt > 0 ) )
        throw std::invalid_argument( "dt must be positive" );
    if ( safety.eps < 2 * dt )
        throw std::invalid_argument( "supervisor delay eps must be at least 2 dt" );
    if ( dwa.A != safety.A || dwa.B != safety.B || dwa.dt != dt )
        throw std::invalid_argument( "DWA limits and period must match the supervisor" );
}

std::optional< Vec2 > sensed_point( const World& w, double range )
{
    std::vector< safety::Disc > near;
    for ( const auto& o : w.obstacles )
        if ( std::hypot( o.position.x - w.robot.x, o.position.y - w.robot.y ) - o.radius <= range )
            near.push_back( { o.position, o.radius } );
    if ( near.empty() )
        return std::nullopt;
    return safety::sense( w.robot.position(), near );
}

void tick( World& w, const Target& target, const FacetRows& corridor, const LoopParams& p, std::size_t step,
           const std::string& action, TraceRecord* trace )
{
    const auto seen = sensed_point( w, p.sensor_range );
    constexpr double far = 1e18;
    const Vec2 q = seen.value_or( Vec2{ far, far } );
    const Control proposed = safety::uses_proposal( w.robot, q, p.safety, w.supervisor )
                                 ? dwa_plan( w.robot, target, corridor, seen, p.dwa )
                                 : Control{ -p.safety.B, 0 };
    const auto d = safety::supervise( w.robot, q, proposed, p.safety, w.supervisor );
    w.supervisor = d.state;
    if ( d.state.mode == safety::Mode::Override )
        ++w.override_ticks;
    if ( trace )
    {
        TraceRow row{ w.t, w.robot, d.command, d.state.mode, step, action, {} };
        for ( const auto& o : w.obstacles )
            row.obstacles.push_back( o.position );
        trace->rows.push_back( std::move( row ) );
    }
    const RobotState before = w.robot;
    w.robot = step_dynamics( w.robot, d.command, p.dt );
    for ( auto& o : w.obstacles )
        step_obstacle( o, before, w.t, p.dt );
    ++w.ticks;
    w.t = static_cast< double >( w.ticks ) * p.dt;
}

DriveStatus drive_to( World& w, const Target& target, const FacetRows& corridor, const LoopParams& p,
                      std::size_t step, const std::string& action, const DriveLimits& limits, TraceRecord* trace )
{
    const double started = w.t;
    double override_since = -1;
    while ( !arrived( w.robot, target, p.dwa ) )
    {
        if ( w.t >= limits.deadline )
            return DriveStatus::OutOfTime;
        if ( w.t - started > limits.step_timeout )
            return DriveStatus::Blocked;
        if ( w.supervisor.mode == safety::Mode::Override )
        {
            if ( override_since < 0 )
                override_since = w.t;
            if ( w.t - override_since > limits.override_timeout )
                return DriveStatus::Blocked;
        }
        else
            override_since = -1;
        tick( w, target, corridor, p, step, action, trace );
    }
    return DriveStatus::Arrived;
}

const char* episode_status_name( EpisodeStatus s )
{
    switch ( s )
    {
    case EpisodeStatus::Completed:
        return "completed";
    case EpisodeStatus::Blocked:
        return "blocked";
    case EpisodeStatus::OutOfTime:
        return "out-of-time";
    }
    return "?";
}

namespace
{

std::string nearest_location( const missiongame::MissionConfig& c, const RobotState& s, double tol )
{
    for ( const auto& l : c.locations )
        if ( std::hypot( to_double( l.x ) - s.x, to_double( l.y ) - s.y ) <= tol )
            return l.name;
    return {};
}

} // namespace

EpisodeResult run_episode( const missiongame::MissionGraph& g, const missiongame::WinningCondition& wc,
                           const missiongame::MissionStrategy& ms, const EpisodeConfig& cfg )
{
    using missiongame::ObjectiveKind;
    using missiongame::Verdict;
    cfg.loop.validate();
    EpisodeResult res;
    const auto arena = missiongame::to_arena( g );
    const auto obj = missiongame::to_objective( g, wc );
    const auto& game = arena.game;

    std::size_t s = cfg.start_state ? *cfg.start_state
                                    : ( ms.initial_states.empty() ? throw std::invalid_argument( "strategy has no initial state" )
                                                                  : ms.initial_states.front() );
    if ( s >= game.size() )
        throw std::invalid_argument( "start state out of range" );
    std::size_t m = ms.strategy.initial_memory;

    World w;
    if ( cfg.start_pose )
        w.robot = *cfg.start_pose;
    else
    {
        const auto& home = g.config.locations.at( g.states[ s ].robot );
        w.robot = { to_double( home.x ), to_double( home.y ), home.theta ? to_double( *home.theta ) : 0.0, 0, 0 };
    }
    w.obstacles = cfg.obstacles;
    res.trace.dt = cfg.loop.dt;
    for ( const auto& o : cfg.obstacles )
        res.trace.obstacle_names.push_back( o.name );

    std::mt19937_64 rng{ cfg.seed };
    std::size_t script_pos = 0;
    const bool buchi = obj.kind == ObjectiveKind::GeneralizedBuchi || obj.kind == ObjectiveKind::SafetyGeneralizedBuchi;
    const bool uses_safe = obj.kind == ObjectiveKind::Safety || obj.kind == ObjectiveKind::SafetyGeneralizedBuchi;
    std::map< std::pair< std::size_t, std::size_t >, std::size_t > seen;
    DriveLimits limits = cfg.limits;
    limits.deadline = cfg.max_t;

    auto finish = [ & ]( EpisodeStatus st, Verdict v, std::string detail ) {
        res.status = st;
        res.verdict = v;
        res.detail = std::move( detail );
        res.override_ticks = w.override_ticks;
        return res;
    };

    for ( std::size_t step = 0;; ++step )
    {
        res.mission_states.push_back( s );
        if ( uses_safe && !obj.safe.empty() && !obj.safe[ s ] )
            return finish( EpisodeStatus::Completed, Verdict::Violated, "unsafe mission state " + std::to_string( s ) );
        if ( obj.kind == ObjectiveKind::Reachability && obj.goals[ 0 ][ s ] )
            return finish( EpisodeStatus::Completed, Verdict::Satisfied, "goal reached" );
        // A lasso only proves the objective once the environment has left its script.
        if ( buchi && script_pos >= cfg.env_script.size() )
        {
            auto [ it, fresh ] = seen.emplace( std::pair{ m, s }, step );
            if ( !fresh )
            {
                bool all = true;
                for ( const auto& goal : obj.goals )
                {
                    bool hit = false;
                    for ( std::size_t k = it->second; k < step && !hit; ++k )
                        hit = goal[ res.mission_states[ k ] ];
                    all = all && hit;
                }
                if ( all )
                    return finish( EpisodeStatus::Completed, Verdict::Satisfied, "accepting lasso" );
                it->second = step;
            }
        }
        if ( game.succ[ s ].empty() )
            return game.owner[ s ] == missiongame::Player::System
                       ? finish( EpisodeStatus::Completed, Verdict::Violated, "system deadlock" )
                       : finish( EpisodeStatus::Completed, Verdict::Satisfied, "environment deadlock" );
        if ( step == cfg.max_mission_steps )
            return finish( EpisodeStatus::Completed,
                           obj.kind == ObjectiveKind::Safety ? Verdict::Satisfied : Verdict::Undetermined,
                           "mission step limit" );

        std::size_t k = 0;
        if ( game.owner[ s ] == missiongame::Player::Environment )
        {
            const auto& edges = arena.edge_of[ s ];
            auto named = [ & ]( const std::string& name ) -> std::optional< std::size_t > {
                for ( std::size_t i = 0; i < edges.size(); ++i )
                    if ( g.env_edges[ edges[ i ] - g.system_edges.size() ].name == name )
                        return i;
                return std::nullopt;
            };
            std::optional< std::size_t > pick;
            if ( script_pos < cfg.env_script.size() )
            {
                pick = named( cfg.env_script[ script_pos ] );
                if ( !pick )
                    return finish( EpisodeStatus::Completed, Verdict::Undetermined,
                                   "environment move '" + cfg.env_script[ script_pos ] + "' unavailable" );
                ++script_pos;
            }
            else
                pick = named( "idle" );
            k = pick ? *pick : std::uniform_int_distribution< std::size_t >{ 0, edges.size() - 1 }( rng );
        }
        else
        {
            k = ms.strategy.move( m, s );
            const auto& edge = g.system_edges.at( arena.edge_of[ s ].at( k ) );
            const auto& action = g.actions.at( edge.action );
            res.system_actions.push_back( action.name );
            if ( !action.plan )
                return finish( EpisodeStatus::Completed, Verdict::Undetermined, "action without plan: " + action.name );
            const auto& plan = *action.plan;
            for ( std::size_t j = 0; j < plan.K; ++j )
            {
                const auto& y = plan.Y[ j ];
                const Target target{ to_double( y.x ), to_double( y.y ), to_double( y.theta ) };
                const auto rows = corridor_rows( plan.P.polytopes.at( j ) );
                const auto status = drive_to( w, target, rows, cfg.loop, j + 1, plan.action_names[ j ], limits,
                                              &res.trace );
                if ( status == DriveStatus::Blocked )
                    return finish( EpisodeStatus::Blocked, Verdict::Undetermined,
                                   "blocked during " + action.name + " step " + std::to_string( j + 1 ) );
                if ( status == DriveStatus::OutOfTime )
                    return finish( EpisodeStatus::OutOfTime, Verdict::Undetermined, "episode time limit" );
                const auto& name = plan.action_names[ j ];
                if ( name.rfind( "pick(", 0 ) == 0 || name.rfind( "drop(", 0 ) == 0 )
                    res.events.push_back( { w.t, name, nearest_location( g.config, w.robot, cfg.loop.dwa.pos_tol ) } );
            }
        }
        m = ms.strategy.update( m, s );
        s = game.succ[ s ][ k ];
    }
}

std::size_t moving_collisions( const TraceRecord& trace, const std::vector< double >& radii, double D_s )
{
    std::size_t bad = 0;
    for ( const auto& r : trace.rows )
    {
        if ( !( r.s.v > 0 ) )
            continue;
        for ( std::size_t i = 0; i < r.obstacles.size() && i < radii.size(); ++i )
            if ( std::hypot( r.s.x - r.obstacles[ i ].x, r.s.y - r.obstacles[ i ].y ) - radii[ i ] <= D_s )
            {
                ++bad;
                break;
            }
    }
    return bad;
}

} // namespace ritmp::simkit
