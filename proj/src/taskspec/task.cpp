#include "ritmp/taskspec/task.hpp"

#include "ritmp/ltlk/eval.hpp"

#include <set>
#include <stdexcept>

namespace ritmp::taskspec
{

using namespace ritmp::ltlk;

void validate_task( const TaskLanguage& task )
{
    if ( task.actions.empty() )
        throw std::invalid_argument( "task needs at least one action" );
    std::set< std::string > names;
    for ( const auto& a : task.actions )
        if ( !names.insert( a.name ).second )
            throw std::invalid_argument( "duplicate action name '" + a.name + "'" );
    if ( task.v0.size() != task.universe.size() )
        throw std::invalid_argument( "initial valuation must assign every variable" );
    for ( VarId v = 0; v < task.universe.size(); ++v )
        if ( !task.universe.admits( v, task.v0[ v ] ) )
            throw std::invalid_argument( "initial value of '" + task.universe[ v ].name + "' is outside its domain" );
    for ( const auto& [ v, value ] : task.vf )
        if ( v >= task.universe.size() || !task.universe.admits( v, value ) )
            throw std::invalid_argument( "final constraint outside the task universe" );
}

namespace
{

Formula valuation( const VariableUniverse& u, const Assignment& a )
{
    std::vector< Formula > parts;
    for ( const auto& [ v, value ] : a )
        parts.push_back( equals( u, v, value ) );
    return conj( std::move( parts ) );
}

Assignment full( const std::vector< Rational >& v0 )
{
    Assignment a;
    for ( VarId v = 0; v < v0.size(); ++v )
        a.emplace_back( v, v0[ v ] );
    return a;
}

} // namespace

TaskEncoding build_phi_task( const TaskLanguage& task )
{
    validate_task( task );
    TaskEncoding enc;
    enc.universe = task.universe;
    const Rational n_actions{ static_cast< long >( task.actions.size() ) };
    enc.action = enc.universe.add( "act", Sort::Integer, Rational{ 1 }, n_actions );
    const TemporalTerm a{ enc.action, 0 };

    std::vector< Formula > step{ linear( { { 1, a } }, Relation::Ge, 1 ), linear( { { 1, a } }, Relation::Le, n_actions ) };
    for ( std::size_t i = 0; i < task.actions.size(); ++i )
    {
        const auto& act = task.actions[ i ];
        Formula chosen = conj( { linear( { { 1, a } }, Relation::Eq, Rational{ static_cast< long >( i + 1 ) } ), neg( last() ) } );
        step.push_back( implies( chosen, conj( { act.pre, act.eff } ) ) );
    }
    enc.phi = conj( { valuation( enc.universe, full( task.v0 ) ), always( implies( last(), valuation( enc.universe, task.vf ) ) ),
                      always( conj( std::move( step ) ) ) } );
    return enc;
}

TaskCheck check_plan_against_task( const BoundedTrace& trace, const TaskLanguage& task, const TaskEncoding& enc )
{
    if ( !eval_formula( valuation( task.universe, full( task.v0 ) ), trace, 0 ) )
        return { false, 0, "initial state differs from v0" };
    if ( !eval_formula( valuation( task.universe, task.vf ), trace, trace.K ) )
        return { false, 0, "final state violates vf" };
    for ( std::size_t k = 0; k < trace.K; ++k )
    {
        const Rational& a = trace.value( enc.action, k );
        if ( !is_integer( a ) || a < 1 || a > static_cast< long >( task.actions.size() ) )
            return { false, k + 1, "action index " + rational_to_string( a ) + " out of range" };
        const auto& act = task.actions[ a.get_num().get_ui() - 1 ];
        if ( !eval_formula( act.pre, trace, k ) )
            return { false, k + 1, "precondition of " + act.name + " fails" };
        if ( !eval_formula( act.eff, trace, k ) )
            return { false, k + 1, "effect of " + act.name + " fails" };
    }
    return {};
}

} // namespace ritmp::taskspec
