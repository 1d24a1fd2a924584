#include "ritmp/missiongame/game.hpp"

#include <deque>
#include <map>
#include <memory>
#include <random>

namespace ritmp::missiongame
{

ObjectiveKind parse_objective_kind( const std::string& text )
{
    if ( text == "safety" )
        return ObjectiveKind::Safety;
    if ( text == "reachability" )
        return ObjectiveKind::Reachability;
    if ( text == "generalized-buchi" )
        return ObjectiveKind::GeneralizedBuchi;
    if ( text == "safety-generalized-buchi" )
        return ObjectiveKind::SafetyGeneralizedBuchi;
    throw UnsupportedObjective( "objective '" + text +
                                "' is outside the supported fragment (safety, reachability, generalized-buchi, "
                                "safety-generalized-buchi)" );
}

std::string objective_kind_name( ObjectiveKind k )
{
    switch ( k )
    {
    case ObjectiveKind::Safety: return "safety";
    case ObjectiveKind::Reachability: return "reachability";
    case ObjectiveKind::GeneralizedBuchi: return "generalized-buchi";
    case ObjectiveKind::SafetyGeneralizedBuchi: return "safety-generalized-buchi";
    }
    return "?";
}

std::string verdict_name( Verdict v )
{
    switch ( v )
    {
    case Verdict::Satisfied: return "satisfied";
    case Verdict::Violated: return "violated";
    case Verdict::Undetermined: return "undetermined";
    }
    return "?";
}

StateSet cpre( const Game& g, const StateSet& z )
{
    StateSet out( g.size(), false );
    for ( std::size_t s = 0; s < g.size(); ++s )
    {
        bool any = false, all = true;
        for ( auto t : g.succ[ s ] )
        {
            any = any || z[ t ];
            all = all && z[ t ];
        }
        out[ s ] = g.owner[ s ] == Player::System ? any : all;
    }
    return out;
}

std::vector< long > attractor( const Game& g, const StateSet& target, const StateSet& within )
{
    const std::size_t n = g.size();
    std::vector< long > rank( n, -1 );
    std::vector< std::vector< std::size_t > > pred( n );
    std::vector< std::size_t > missing( n );
    for ( std::size_t s = 0; s < n; ++s )
    {
        missing[ s ] = g.succ[ s ].size();
        for ( auto t : g.succ[ s ] )
            pred[ t ].push_back( s );
    }
    std::deque< std::size_t > queue;
    for ( std::size_t s = 0; s < n; ++s )
        if ( within[ s ] && target[ s ] )
        {
            rank[ s ] = 0;
            queue.push_back( s );
        }
    // Environment dead ends lose for the environment.
    for ( std::size_t s = 0; s < n; ++s )
        if ( within[ s ] && rank[ s ] < 0 && g.owner[ s ] == Player::Environment && g.succ[ s ].empty() )
        {
            rank[ s ] = 1;
            queue.push_back( s );
        }
    while ( !queue.empty() )
    {
        auto t = queue.front();
        queue.pop_front();
        for ( auto s : pred[ t ] )
        {
            if ( rank[ s ] >= 0 || !within[ s ] )
                continue;
            if ( g.owner[ s ] == Player::System )
            {
                rank[ s ] = rank[ t ] + 1;
                queue.push_back( s );
            }
            else if ( --missing[ s ] == 0 )
            {
                long worst = 0;
                for ( auto u : g.succ[ s ] )
                    worst = std::max( worst, rank[ u ] );
                rank[ s ] = worst + 1;
                queue.push_back( s );
            }
        }
    }
    return rank;
}

namespace
{

void check_shape( const Game& g, const Objective& o )
{
    if ( g.succ.size() != g.size() )
        throw std::invalid_argument( "game successor table has the wrong size" );
    for ( const auto& row : g.succ )
        for ( auto t : row )
            if ( t >= g.size() )
                throw std::invalid_argument( "game edge leaves the state set" );
    if ( !o.safe.empty() && o.safe.size() != g.size() )
        throw std::invalid_argument( "safe set has the wrong size" );
    for ( const auto& p : o.goals )
        if ( p.size() != g.size() )
            throw std::invalid_argument( "goal set has the wrong size" );
    if ( o.kind == ObjectiveKind::Reachability && o.goals.size() != 1 )
        throw std::invalid_argument( "reachability takes exactly one goal set" );
    if ( ( o.kind == ObjectiveKind::GeneralizedBuchi || o.kind == ObjectiveKind::SafetyGeneralizedBuchi ) &&
         o.goals.empty() )
        throw std::invalid_argument( "generalized Buchi needs at least one goal set" );
}

std::size_t lowest_rank_move( const Game& g, std::size_t s, const std::vector< long >& rank )
{
    std::size_t best = 0;
    long best_rank = -1;
    for ( std::size_t k = 0; k < g.succ[ s ].size(); ++k )
    {
        long r = rank[ g.succ[ s ][ k ] ];
        if ( r >= 0 && ( best_rank < 0 || r < best_rank ) )
        {
            best = k;
            best_rank = r;
        }
    }
    return best;
}

Solution solve_reachability( const Game& g, const StateSet& goal )
{
    Solution out;
    auto rank = attractor( g, goal, StateSet( g.size(), true ) );
    out.winning.resize( g.size() );
    out.strategy.choice.assign( 1, std::vector< std::size_t >( g.size(), 0 ) );
    out.strategy.next.assign( 1, std::vector< std::size_t >( g.size(), 0 ) );
    for ( std::size_t s = 0; s < g.size(); ++s )
    {
        out.winning[ s ] = rank[ s ] >= 0;
        if ( rank[ s ] > 0 && g.owner[ s ] == Player::System )
            out.strategy.choice[ 0 ][ s ] = lowest_rank_move( g, s, rank );
    }
    return out;
}

// nu Z. and_i mu Y. (q & p_i & CPre(Z)) | (q & CPre(Y)); memory i chases goal i.
Solution solve_buchi( const Game& g, const StateSet& q, const std::vector< StateSet >& goals )
{
    const std::size_t n = g.size(), m = goals.size();
    StateSet z = q;
    std::vector< StateSet > targets( m );
    std::vector< std::vector< long > > ranks( m );
    for ( ;; )
    {
        auto cz = cpre( g, z );
        StateSet next( n, true );
        for ( std::size_t i = 0; i < m; ++i )
        {
            targets[ i ].assign( n, false );
            for ( std::size_t s = 0; s < n; ++s )
                targets[ i ][ s ] = q[ s ] && goals[ i ][ s ] && cz[ s ];
            ranks[ i ] = attractor( g, targets[ i ], q );
            for ( std::size_t s = 0; s < n; ++s )
                next[ s ] = next[ s ] && ranks[ i ][ s ] >= 0;
        }
        if ( next == z )
            break;
        z = std::move( next );
    }
    Solution out;
    out.winning = z;
    auto& st = out.strategy;
    st.memory_size = m;
    st.choice.assign( m, std::vector< std::size_t >( n, 0 ) );
    st.next.assign( m, std::vector< std::size_t >( n, 0 ) );
    for ( std::size_t i = 0; i < m; ++i )
        for ( std::size_t s = 0; s < n; ++s )
        {
            const bool hit = targets[ i ][ s ];
            st.next[ i ][ s ] = hit ? ( i + 1 ) % m : i;
            if ( g.owner[ s ] != Player::System || g.succ[ s ].empty() )
                continue;
            if ( hit )
            {
                // Any successor in Z wins; take the one closest to the next goal.
                const auto& next_rank = ranks[ ( i + 1 ) % m ];
                long best = -1;
                for ( std::size_t k = 0; k < g.succ[ s ].size(); ++k )
                {
                    const auto t = g.succ[ s ][ k ];
                    if ( z[ t ] && ( best < 0 || next_rank[ t ] < best ) )
                    {
                        best = next_rank[ t ];
                        st.choice[ i ][ s ] = k;
                    }
                }
            }
            else if ( ranks[ i ][ s ] > 0 )
                st.choice[ i ][ s ] = lowest_rank_move( g, s, ranks[ i ] );
        }
    return out;
}

} // namespace

Solution solve( const Game& g, const Objective& o )
{
    check_shape( g, o );
    StateSet q = o.safe.empty() ? StateSet( g.size(), true ) : o.safe;
    switch ( o.kind )
    {
    case ObjectiveKind::Reachability: return solve_reachability( g, o.goals[ 0 ] );
    case ObjectiveKind::Safety: return solve_buchi( g, q, { StateSet( g.size(), true ) } );
    case ObjectiveKind::GeneralizedBuchi: return solve_buchi( g, StateSet( g.size(), true ), o.goals );
    case ObjectiveKind::SafetyGeneralizedBuchi: return solve_buchi( g, q, o.goals );
    }
    throw UnsupportedObjective( "unknown objective kind" );
}

EnvPolicy random_policy( std::uint64_t seed )
{
    auto rng = std::make_shared< std::mt19937_64 >( seed );
    return [ rng ]( const Game& g, std::size_t s, std::size_t ) {
        return std::uniform_int_distribution< std::size_t >{ 0, g.succ[ s ].size() - 1 }( *rng );
    };
}

EnvPolicy first_move_policy()
{
    return []( const Game&, std::size_t, std::size_t ) { return std::size_t{ 0 }; };
}

EnvPolicy spoiler_policy( StateSet keep, std::uint64_t seed )
{
    auto fallback = random_policy( seed );
    return [ keep = std::move( keep ), fallback ]( const Game& g, std::size_t s, std::size_t step ) {
        for ( std::size_t k = 0; k < g.succ[ s ].size(); ++k )
            if ( !keep[ g.succ[ s ][ k ] ] )
                return k;
        return fallback( g, s, step );
    };
}

Playout play( const Game& g, const Objective& o, const Strategy& st, const EnvPolicy& env, std::size_t start,
              std::size_t max_steps )
{
    check_shape( g, o );
    Playout out;
    std::size_t s = start, m = st.initial_memory;
    const bool buchi = o.kind == ObjectiveKind::GeneralizedBuchi || o.kind == ObjectiveKind::SafetyGeneralizedBuchi;
    const bool uses_safe = o.kind == ObjectiveKind::Safety || o.kind == ObjectiveKind::SafetyGeneralizedBuchi;
    std::map< std::pair< std::size_t, std::size_t >, std::size_t > seen;
    auto finish = [ & ]( Verdict v, std::string detail ) {
        out.verdict = v;
        out.detail = std::move( detail );
        return out;
    };
    for ( std::size_t step = 0;; ++step )
    {
        out.states.push_back( s );
        out.memory.push_back( m );
        if ( uses_safe && !o.safe.empty() && !o.safe[ s ] )
            return finish( Verdict::Violated, "unsafe state " + std::to_string( s ) + " at step " + std::to_string( step ) );
        if ( o.kind == ObjectiveKind::Reachability && o.goals[ 0 ][ s ] )
            return finish( Verdict::Satisfied, "goal reached at step " + std::to_string( step ) );
        if ( buchi )
        {
            auto [ it, fresh ] = seen.emplace( std::pair{ m, s }, step );
            if ( !fresh )
            {
                bool all = true;
                for ( const auto& p : o.goals )
                {
                    bool hit = false;
                    for ( std::size_t k = it->second; k < step && !hit; ++k )
                        hit = p[ out.states[ k ] ];
                    all = all && hit;
                }
                if ( all )
                    return finish( Verdict::Satisfied, "lasso from step " + std::to_string( it->second ) + " to " +
                                                           std::to_string( step ) + " visits every goal" );
                it->second = step;
            }
        }
        if ( g.succ[ s ].empty() )
            return g.owner[ s ] == Player::System
                       ? finish( Verdict::Violated, "system deadlock at state " + std::to_string( s ) )
                       : finish( Verdict::Satisfied, "environment deadlock at state " + std::to_string( s ) );
        if ( step == max_steps )
        {
            if ( o.kind == ObjectiveKind::Safety )
                return finish( Verdict::Satisfied, "no violation in " + std::to_string( max_steps ) + " steps" );
            if ( o.kind == ObjectiveKind::Reachability )
                return finish( Verdict::Violated, "goal not reached in " + std::to_string( max_steps ) + " steps" );
            return finish( Verdict::Violated, "no accepting lasso in " + std::to_string( max_steps ) + " steps" );
        }
        std::size_t k = g.owner[ s ] == Player::System ? st.move( m, s ) : env( g, s, step );
        if ( k >= g.succ[ s ].size() )
            return finish( Verdict::Violated, "move index out of range at state " + std::to_string( s ) );
        m = st.update( m, s );
        s = g.succ[ s ][ k ];
    }
}

} // namespace ritmp::missiongame
