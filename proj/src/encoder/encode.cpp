#include "ritmp/encoder/encoder.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace ritmp::encoder
{

using namespace ritmp::ltlk;

namespace
{

bool simple_symbol( const std::string& s )
{
    if ( s.empty() || std::isdigit( static_cast< unsigned char >( s.front() ) ) )
        return false;
    return std::all_of( s.begin(), s.end(), []( char c ) {
        return std::isalnum( static_cast< unsigned char >( c ) ) || c == '_' || c == '.' || c == '!';
    } );
}

std::string int_literal( const mpz_class& z )
{
    return z < 0 ? "(- " + mpz_class{ -z }.get_str() + ")" : z.get_str();
}

std::string real_literal( const Rational& q )
{
    Rational a = abs( q );
    std::string body = a.get_den() == 1 ? a.get_num().get_str() + ".0"
                                        : "(/ " + a.get_num().get_str() + ".0 " + a.get_den().get_str() + ".0)";
    return q < 0 ? "(- " + body + ")" : body;
}

std::string sort_symbol( Sort s )
{
    switch ( s )
    {
    case Sort::Real:
        return "Real";
    case Sort::Integer:
        return "Int";
    case Sort::Boolean:
        return "Bool";
    }
    return "?";
}

class Encoder
{
public:
    Encoder( std::size_t K, const VariableUniverse& u ) : _K{ K }, _u{ u }
    {
        for ( VarId v = 0; v < u.size(); ++v )
            for ( std::size_t k = 0; k <= K; ++k )
                _cs.declarations.push_back( { state_symbol( u[ v ].name, k ), u[ v ].sort, false } );
        _cs.K = K;
    }

    ConstraintSystem run( const Formula& phi )
    {
        bool has_real = false;
        bool has_int = false;
        for ( VarId v = 0; v < _u.size(); ++v )
        {
            const auto& d = _u[ v ];
            has_real = has_real || d.sort == Sort::Real;
            has_int = has_int || d.sort == Sort::Integer;
            if ( d.sort == Sort::Integer && ( !d.lo || !d.hi ) )
                _cs.warnings.push_back( "integer variable '" + d.name +
                                        "' lacks bounds; finite-domain completeness does not apply" );
            if ( d.sort == Sort::Boolean )
                continue;
            for ( std::size_t k = 0; k <= _K; ++k )
            {
                if ( d.lo )
                    _cs.assertions.push_back( "(assert (<= " + constant( *d.lo, d.sort ) + " " + use( v, k ) + "))" );
                if ( d.hi )
                    _cs.assertions.push_back( "(assert (<= " + use( v, k ) + " " + constant( *d.hi, d.sort ) + "))" );
            }
        }
        _cs.logic = has_real && has_int ? "QF_LIRA" : has_real ? "QF_LRA" : "QF_LIA";
        _cs.assertions.push_back( "(assert " + lit( phi, 0 ) + ")" );
        return std::move( _cs );
    }

private:
    std::string constant( const Rational& q, Sort s ) const
    {
        return s == Sort::Integer ? int_literal( q.get_num() ) : real_literal( q );
    }

    std::string use( VarId v, std::size_t k )
    {
        auto& d = _cs.declarations[ v * ( _K + 1 ) + k ];
        d.referenced = true;
        return d.symbol;
    }

    std::size_t next( std::size_t k ) const { return std::min( k + 1, _K ); }

    std::string linear_atom( const LinearPredicate& p, std::size_t k )
    {
        bool all_int = true;
        for ( const auto& [ c, t ] : p.terms )
        {
            if ( _u[ t.var ].sort == Sort::Boolean )
                throw std::invalid_argument( "boolean variable '" + _u[ t.var ].name + "' inside a linear term" );
            all_int = all_int && _u[ t.var ].sort == Sort::Integer;
        }
        std::vector< std::string > summands;
        std::string rhs;
        if ( all_int )
        {
            mpz_class scale = p.rhs.get_den();
            for ( const auto& [ c, t ] : p.terms )
                mpz_lcm( scale.get_mpz_t(), scale.get_mpz_t(), c.get_den().get_mpz_t() );
            for ( const auto& [ c, t ] : p.terms )
            {
                Rational s = c * scale;
                std::string x = use( t.var, std::min( k + t.nexts, _K ) );
                summands.push_back( s == 1 ? x : "(* " + int_literal( s.get_num() ) + " " + x + ")" );
            }
            rhs = int_literal( Rational{ p.rhs * scale }.get_num() );
        }
        else
        {
            for ( const auto& [ c, t ] : p.terms )
            {
                std::string x = use( t.var, std::min( k + t.nexts, _K ) );
                if ( _u[ t.var ].sort == Sort::Integer )
                    x = "(to_real " + x + ")";
                summands.push_back( c == 1 ? x : "(* " + real_literal( c ) + " " + x + ")" );
            }
            rhs = real_literal( p.rhs );
        }
        std::string lhs = summands.size() == 1 ? summands.front() : "(+";
        if ( summands.size() > 1 )
        {
            for ( const auto& s : summands )
                lhs += " " + s;
            lhs += ")";
        }
        switch ( p.rel )
        {
        case Relation::Le:
            return "(<= " + lhs + " " + rhs + ")";
        case Relation::Lt:
            return "(< " + lhs + " " + rhs + ")";
        case Relation::Eq:
            return "(= " + lhs + " " + rhs + ")";
        case Relation::Gt:
            return "(> " + lhs + " " + rhs + ")";
        case Relation::Ge:
            return "(>= " + lhs + " " + rhs + ")";
        }
        return "";
    }

    // Literal standing for `f` at step k: a constant or the (subformula, step) label.
    std::string lit( const Formula& f, std::size_t k )
    {
        switch ( f.op() )
        {
        case Op::True:
            return "true";
        case Op::False:
            return "false";
        case Op::Last:
            return k == _K ? "true" : "false";
        default:
            break;
        }
        auto it = _node_ids.try_emplace( f.node(), _node_ids.size() ).first;
        const std::string key = std::to_string( it->second ) + "__" + std::to_string( k );
        if ( auto done = _labels.find( key ); done != _labels.end() )
            return done->second;
        std::string label = "L!" + key;
        _labels.emplace( key, label );
        _cs.declarations.push_back( { label, Sort::Boolean, true } );
        std::string def = definition( f, k );
        _cs.assertions.push_back( "(assert (= " + label + " " + def + "))" );
        return label;
    }

    std::string nary( const char* op, const std::vector< Formula >& kids, std::size_t k )
    {
        if ( kids.empty() )
            return std::string{ op } == "and" ? "true" : "false";
        if ( kids.size() == 1 )
            return lit( kids.front(), k );
        std::string s = std::string{ "(" } + op;
        for ( const auto& c : kids )
            s += " " + lit( c, k );
        return s + ")";
    }

    std::string definition( const Formula& f, std::size_t k )
    {
        switch ( f.op() )
        {
        case Op::Atom: {
            if ( const auto* b = std::get_if< BoolAtom >( &f.atom() ) )
            {
                if ( _u[ b->term.var ].sort != Sort::Boolean )
                    throw std::invalid_argument( "numeric variable '" + _u[ b->term.var ].name +
                                                 "' used as a boolean atom" );
                return use( b->term.var, std::min( k + b->term.nexts, _K ) );
            }
            return linear_atom( std::get< LinearPredicate >( f.atom() ), k );
        }
        case Op::Not:
            return "(not " + lit( f.child(), k ) + ")";
        case Op::And:
            return nary( "and", f.children(), k );
        case Op::Or:
            return nary( "or", f.children(), k );
        case Op::Implies:
            return "(=> " + lit( f.child( 0 ), k ) + " " + lit( f.child( 1 ), k ) + ")";
        case Op::Next:
            return lit( f.child(), next( k ) );
        case Op::Until:
            if ( k == _K )
                return lit( f.child( 1 ), k );
            return "(or " + lit( f.child( 1 ), k ) + " (and " + lit( f.child( 0 ), k ) + " " + lit( f, k + 1 ) + "))";
        case Op::Eventually:
            if ( k == _K )
                return lit( f.child(), k );
            return "(or " + lit( f.child(), k ) + " " + lit( f, k + 1 ) + ")";
        case Op::Always:
            if ( k == _K )
                return lit( f.child(), k );
            return "(and " + lit( f.child(), k ) + " " + lit( f, k + 1 ) + ")";
        default:
            return lit( f, k );
        }
    }

    std::size_t _K;
    const VariableUniverse& _u;
    ConstraintSystem _cs;
    std::unordered_map< const FormulaNode*, std::size_t > _node_ids;
    std::unordered_map< std::string, std::string > _labels;
};

} // namespace

std::string state_symbol( const std::string& name, std::size_t k )
{
    std::string s = name + "__" + std::to_string( k );
    return simple_symbol( s ) ? s : "|" + s + "|";
}

ConstraintSystem encode( const Formula& phi, std::size_t K, const VariableUniverse& u )
{
    if ( K < 1 )
        throw std::invalid_argument( "horizon K must be at least 1" );
    return Encoder{ K, u }.run( phi );
}

std::string emit_smtlib( const ConstraintSystem& cs )
{
    std::string out = "(set-option :produce-models true)\n(set-logic " + cs.logic + ")\n";
    for ( const auto& d : cs.declarations )
        out += "(declare-fun " + d.symbol + " () " + sort_symbol( d.sort ) + ")\n";
    for ( const auto& a : cs.assertions )
        out += a + "\n";
    out += "(check-sat)\n(get-model)\n(exit)\n";
    return out;
}

std::string_view status_name( Status s )
{
    switch ( s )
    {
    case Status::Sat:
        return "sat";
    case Status::Unsat:
        return "unsat";
    case Status::Unknown:
        return "unknown";
    }
    return "?";
}

} // namespace ritmp::encoder
