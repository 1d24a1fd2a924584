#include "ritmp/ltlk/formula.hpp"

#include <algorithm>
#include <stdexcept>

namespace ritmp::ltlk
{

std::string_view relation_symbol( Relation r )
{
    switch ( r )
    {
    case Relation::Le:
        return "<=";
    case Relation::Lt:
        return "<";
    case Relation::Eq:
        return "=";
    case Relation::Gt:
        return ">";
    case Relation::Ge:
        return ">=";
    }
    return "?";
}

bool holds( const Rational& lhs, Relation r, const Rational& rhs )
{
    switch ( r )
    {
    case Relation::Le:
        return lhs <= rhs;
    case Relation::Lt:
        return lhs < rhs;
    case Relation::Eq:
        return lhs == rhs;
    case Relation::Gt:
        return lhs > rhs;
    case Relation::Ge:
        return lhs >= rhs;
    }
    return false;
}

namespace
{

const Formula& shared_top()
{
    static const Formula t = Formula::make( Op::True, {} );
    return t;
}

} // namespace

Formula::Formula() : Formula{ shared_top() } {}

Formula Formula::make( Op op, std::vector< Formula > children, AtomicProposition atom )
{
    auto node = std::make_shared< FormulaNode >( FormulaNode{ op, std::move( atom ), std::move( children ) } );
    return Formula{ std::move( node ) };
}

bool operator==( const Formula& a, const Formula& b )
{
    if ( a._node == b._node )
        return true;
    if ( a.op() != b.op() || a.children().size() != b.children().size() )
        return false;
    if ( a.op() == Op::Atom && !( a.atom() == b.atom() ) )
        return false;
    for ( std::size_t i = 0; i < a.children().size(); ++i )
        if ( !( a.children()[ i ] == b.children()[ i ] ) )
            return false;
    return true;
}

Formula top() { return shared_top(); }
Formula bottom() { return Formula::make( Op::False, {} ); }
Formula last() { return Formula::make( Op::Last, {} ); }
Formula atom( AtomicProposition a ) { return Formula::make( Op::Atom, {}, std::move( a ) ); }
Formula bool_var( VarId v, unsigned nexts ) { return atom( BoolAtom{ TemporalTerm{ v, nexts } } ); }

Formula linear( std::vector< std::pair< Rational, TemporalTerm > > terms, Relation rel, Rational rhs )
{
    if ( terms.empty() )
        throw std::invalid_argument( "linear predicate needs at least one term" );
    return atom( LinearPredicate{ std::move( terms ), rel, std::move( rhs ) } );
}

Formula neg( Formula f ) { return Formula::make( Op::Not, { std::move( f ) } ); }

Formula conj( std::vector< Formula > fs )
{
    if ( fs.empty() )
        return top();
    if ( fs.size() == 1 )
        return fs.front();
    return Formula::make( Op::And, std::move( fs ) );
}

Formula disj( std::vector< Formula > fs )
{
    if ( fs.empty() )
        return bottom();
    if ( fs.size() == 1 )
        return fs.front();
    return Formula::make( Op::Or, std::move( fs ) );
}

Formula implies( Formula a, Formula b ) { return Formula::make( Op::Implies, { std::move( a ), std::move( b ) } ); }
Formula next( Formula f ) { return Formula::make( Op::Next, { std::move( f ) } ); }
Formula until( Formula a, Formula b ) { return Formula::make( Op::Until, { std::move( a ), std::move( b ) } ); }
Formula eventually( Formula f ) { return Formula::make( Op::Eventually, { std::move( f ) } ); }
Formula always( Formula f ) { return Formula::make( Op::Always, { std::move( f ) } ); }

Formula equals( const VariableUniverse& u, VarId var, const Rational& value, unsigned nexts )
{
    if ( u[ var ].sort == Sort::Boolean )
    {
        Formula b = bool_var( var, 0 );
        for ( unsigned i = 0; i < nexts; ++i )
            b = next( b );
        return value != 0 ? b : neg( b );
    }
    return linear( { { Rational{ 1 }, TemporalTerm{ var, nexts } } }, Relation::Eq, value );
}

namespace
{

// Binding strength used by the printer: larger binds tighter.
int precedence( Op op )
{
    switch ( op )
    {
    case Op::Implies:
        return 1;
    case Op::Or:
        return 2;
    case Op::And:
        return 3;
    case Op::Until:
        return 4;
    case Op::Not:
    case Op::Next:
    case Op::Eventually:
    case Op::Always:
        return 5;
    default:
        return 6;
    }
}

void print_term( std::string& out, const TemporalTerm& t, const VariableUniverse& u )
{
    for ( unsigned i = 0; i < t.nexts; ++i )
        out += "X ";
    out += u[ t.var ].name;
}

void print_atom( std::string& out, const AtomicProposition& a, const VariableUniverse& u )
{
    if ( const auto* b = std::get_if< BoolAtom >( &a ) )
    {
        print_term( out, b->term, u );
        return;
    }
    const auto& p = std::get< LinearPredicate >( a );
    bool first = true;
    for ( const auto& [ coeff, term ] : p.terms )
    {
        Rational mag = abs( coeff );
        if ( first )
            out += coeff < 0 ? "-" : "";
        else
            out += coeff < 0 ? " - " : " + ";
        if ( mag != 1 )
        {
            out += rational_to_decimal_or_fraction( mag );
            out += "*";
        }
        print_term( out, term, u );
        first = false;
    }
    out += " ";
    out += relation_symbol( p.rel );
    out += " ";
    out += rational_to_decimal_or_fraction( p.rhs );
}

void print( std::string& out, const Formula& f, const VariableUniverse& u );

void print_child( std::string& out, const Formula& child, bool parens, const VariableUniverse& u )
{
    if ( parens )
        out += "(";
    print( out, child, u );
    if ( parens )
        out += ")";
}

void print( std::string& out, const Formula& f, const VariableUniverse& u )
{
    const int prec = precedence( f.op() );
    switch ( f.op() )
    {
    case Op::True:
        out += "true";
        return;
    case Op::False:
        out += "false";
        return;
    case Op::Last:
        out += "last";
        return;
    case Op::Atom:
        print_atom( out, f.atom(), u );
        return;
    case Op::Not:
    case Op::Next:
    case Op::Eventually:
    case Op::Always: {
        out += f.op() == Op::Not ? "!" : f.op() == Op::Next ? "X " : f.op() == Op::Eventually ? "F " : "G ";
        const Formula& c = f.child();
        // "X x <= 1" would read back as a next-term atom, so a Next over an atom keeps its parentheses.
        bool parens = precedence( c.op() ) < prec || ( f.op() == Op::Next && c.op() == Op::Atom &&
                                                       std::holds_alternative< LinearPredicate >( c.atom() ) );
        print_child( out, c, parens, u );
        return;
    }
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::Until: {
        const char* sep = f.op() == Op::And ? " && " : f.op() == Op::Or ? " || " : f.op() == Op::Implies ? " -> " : " U ";
        for ( std::size_t i = 0; i < f.children().size(); ++i )
        {
            if ( i > 0 )
                out += sep;
            const Formula& c = f.children()[ i ];
            print_child( out, c, precedence( c.op() ) <= prec, u );
        }
        return;
    }
    }
}

} // namespace

std::string to_string( const Formula& f, const VariableUniverse& u )
{
    std::string out;
    print( out, f, u );
    return out;
}

Formula normalize( const Formula& f )
{
    switch ( f.op() )
    {
    case Op::True:
    case Op::False:
    case Op::Last:
        return f;
    case Op::Atom: {
        if ( const auto* b = std::get_if< BoolAtom >( &f.atom() ) )
        {
            Formula g = bool_var( b->term.var, 0 );
            for ( unsigned i = 0; i < b->term.nexts; ++i )
                g = next( g );
            return g;
        }
        const auto& p = std::get< LinearPredicate >( f.atom() );
        std::vector< std::pair< Rational, TemporalTerm > > merged;
        for ( const auto& [ c, t ] : p.terms )
        {
            auto it = std::find_if( merged.begin(), merged.end(), [ & ]( const auto& e ) { return e.second == t; } );
            if ( it == merged.end() )
                merged.emplace_back( c, t );
            else
                it->first += c;
        }
        std::erase_if( merged, []( const auto& e ) { return e.first == 0; } );
        if ( merged.empty() )
            return holds( Rational{ 0 }, p.rel, p.rhs ) ? top() : bottom();
        return linear( std::move( merged ), p.rel, p.rhs );
    }
    default: {
        std::vector< Formula > kids;
        kids.reserve( f.children().size() );
        for ( const auto& c : f.children() )
            kids.push_back( normalize( c ) );
        return Formula::make( f.op(), std::move( kids ) );
    }
    }
}

std::size_t depth( const Formula& f )
{
    std::size_t d = 0;
    for ( const auto& c : f.children() )
        d = std::max( d, depth( c ) );
    return f.children().empty() ? 0 : d + 1;
}

std::size_t size( const Formula& f )
{
    std::size_t n = 1;
    for ( const auto& c : f.children() )
        n += size( c );
    return n;
}

std::uint64_t fingerprint( const Formula& f, const VariableUniverse& u )
{
    std::uint64_t h = 1469598103934665603ull;
    for ( unsigned char c : to_string( f, u ) )
    {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace ritmp::ltlk
