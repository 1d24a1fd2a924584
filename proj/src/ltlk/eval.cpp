#include "ritmp/ltlk/eval.hpp"

#include <algorithm>
#include <stdexcept>

namespace ritmp::ltlk
{

namespace
{

void check_instant( const BoundedTrace& trace, std::size_t k )
{
    if ( k > trace.K )
        throw std::out_of_range( "instant " + std::to_string( k ) + " beyond horizon " + std::to_string( trace.K ) );
}

bool eval_until( const Formula& lhs, const Formula& rhs, const BoundedTrace& trace, std::size_t k )
{
    for ( std::size_t i = k; i <= trace.K; ++i )
    {
        if ( !eval_formula( rhs, trace, i ) )
            continue;
        bool prefix = true;
        for ( std::size_t j = k; j < i && prefix; ++j )
            prefix = eval_formula( lhs, trace, j );
        if ( prefix )
            return true;
    }
    return false;
}

} // namespace

Rational eval_term( const TemporalTerm& term, const BoundedTrace& trace, std::size_t k )
{
    check_instant( trace, k );
    return trace.value( term.var, std::min< std::size_t >( k + term.nexts, trace.K ) );
}

bool eval_atom( const AtomicProposition& a, const BoundedTrace& trace, std::size_t k )
{
    if ( const auto* b = std::get_if< BoolAtom >( &a ) )
        return eval_term( b->term, trace, k ) != 0;
    const auto& p = std::get< LinearPredicate >( a );
    Rational lhs;
    for ( const auto& [ coeff, term ] : p.terms )
        lhs += coeff * eval_term( term, trace, k );
    return holds( lhs, p.rel, p.rhs );
}

bool eval_formula( const Formula& phi, const BoundedTrace& trace, std::size_t k )
{
    check_instant( trace, k );
    switch ( phi.op() )
    {
    case Op::True:
        return true;
    case Op::False:
        return false;
    case Op::Last:
        return k == trace.K;
    case Op::Atom:
        return eval_atom( phi.atom(), trace, k );
    case Op::Not:
        return !eval_formula( phi.child(), trace, k );
    case Op::And:
        return std::all_of( phi.children().begin(), phi.children().end(),
                            [ & ]( const Formula& c ) { return eval_formula( c, trace, k ); } );
    case Op::Or:
        return std::any_of( phi.children().begin(), phi.children().end(),
                            [ & ]( const Formula& c ) { return eval_formula( c, trace, k ); } );
    case Op::Implies:
        return !eval_formula( phi.child( 0 ), trace, k ) || eval_formula( phi.child( 1 ), trace, k );
    case Op::Next:
        return eval_formula( phi.child(), trace, std::min( k + 1, trace.K ) );
    case Op::Until:
        return eval_until( phi.child( 0 ), phi.child( 1 ), trace, k );
    case Op::Eventually:
        return eval_until( top(), phi.child(), trace, k );
    case Op::Always:
        return !eval_until( top(), neg( phi.child() ), trace, k );
    }
    return false;
}

} // namespace ritmp::ltlk
