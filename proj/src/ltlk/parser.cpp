#include "ritmp/ltlk/parser.hpp"

#include <cctype>
#include <optional>
#include <vector>

namespace ritmp::ltlk
{

ParseError::ParseError( const std::string& message, std::size_t line, std::size_t column )
    : std::runtime_error{ "syntax error at " + std::to_string( line ) + ":" + std::to_string( column ) + ": " +
                          message },
      _line{ line }, _column{ column }
{
}

UndeclaredVariable::UndeclaredVariable( std::string name )
    : std::runtime_error{ "undeclared variable '" + name + "'" }, _name{ std::move( name ) }
{
}

namespace
{

enum class Tok
{
    Ident,
    Number,
    LParen,
    RParen,
    Not,
    And,
    Or,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Le,
    Lt,
    Eq,
    Gt,
    Ge,
    KwX,
    KwU,
    KwF,
    KwG,
    KwTrue,
    KwFalse,
    KwLast,
    End
};

struct Token
{
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

std::vector< Token > lex( std::string_view src )
{
    std::vector< Token > out;
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t i = 0;
    auto push = [ & ]( Tok k, std::size_t len ) {
        out.push_back( Token{ k, std::string{ src.substr( i, len ) }, line, col } );
        i += len;
        col += len;
    };
    while ( i < src.size() )
    {
        char c = src[ i ];
        if ( c == '\n' )
        {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if ( std::isspace( static_cast< unsigned char >( c ) ) )
        {
            ++i;
            ++col;
            continue;
        }
        auto two = src.substr( i, 2 );
        if ( two == "&&" )
            push( Tok::And, 2 );
        else if ( two == "||" )
            push( Tok::Or, 2 );
        else if ( two == "->" )
            push( Tok::Arrow, 2 );
        else if ( two == "<=" )
            push( Tok::Le, 2 );
        else if ( two == ">=" )
            push( Tok::Ge, 2 );
        else if ( c == '(' )
            push( Tok::LParen, 1 );
        else if ( c == ')' )
            push( Tok::RParen, 1 );
        else if ( c == '!' )
            push( Tok::Not, 1 );
        else if ( c == '+' )
            push( Tok::Plus, 1 );
        else if ( c == '-' )
            push( Tok::Minus, 1 );
        else if ( c == '*' )
            push( Tok::Star, 1 );
        else if ( c == '/' )
            push( Tok::Slash, 1 );
        else if ( c == '<' )
            push( Tok::Lt, 1 );
        else if ( c == '>' )
            push( Tok::Gt, 1 );
        else if ( c == '=' )
            push( Tok::Eq, 1 );
        else if ( std::isdigit( static_cast< unsigned char >( c ) ) )
        {
            std::size_t j = i;
            while ( j < src.size() && std::isdigit( static_cast< unsigned char >( src[ j ] ) ) )
                ++j;
            if ( j < src.size() && src[ j ] == '.' )
            {
                ++j;
                while ( j < src.size() && std::isdigit( static_cast< unsigned char >( src[ j ] ) ) )
                    ++j;
            }
            push( Tok::Number, j - i );
        }
        else if ( std::isalpha( static_cast< unsigned char >( c ) ) || c == '_' )
        {
            std::size_t j = i;
            while ( j < src.size() && ( std::isalnum( static_cast< unsigned char >( src[ j ] ) ) || src[ j ] == '_' ) )
                ++j;
            auto word = src.substr( i, j - i );
            Tok k = Tok::Ident;
            if ( word == "X" )
                k = Tok::KwX;
            else if ( word == "U" )
                k = Tok::KwU;
            else if ( word == "F" )
                k = Tok::KwF;
            else if ( word == "G" )
                k = Tok::KwG;
            else if ( word == "true" )
                k = Tok::KwTrue;
            else if ( word == "false" )
                k = Tok::KwFalse;
            else if ( word == "last" )
                k = Tok::KwLast;
            push( k, j - i );
        }
        else
            throw ParseError( std::string{ "unexpected character '" } + c + "'", line, col );
    }
    out.push_back( Token{ Tok::End, "", line, col } );
    return out;
}

class Parser
{
public:
    Parser( std::vector< Token > tokens, const VariableUniverse& u ) : _toks{ std::move( tokens ) }, _u{ u } {}

    Formula parse_all()
    {
        Formula f = parse_implies();
        if ( peek().kind != Tok::End )
            fail( "unexpected '" + peek().text + "'" );
        return f;
    }

private:
    struct LinearSum
    {
        std::vector< std::pair< Rational, TemporalTerm > > terms;
        Rational constant;
    };

    const Token& peek() const { return _toks[ _pos ]; }
    const Token& take() { return _toks[ _pos++ ]; }
    bool accept( Tok k )
    {
        if ( peek().kind != k )
            return false;
        ++_pos;
        return true;
    }
    [[noreturn]] void fail( const std::string& msg ) const
    {
        throw ParseError( msg, peek().line, peek().column );
    }
    void expect( Tok k, const char* what )
    {
        if ( !accept( k ) )
            fail( std::string{ "expected " } + what + ( peek().kind == Tok::End ? " before end of input"
                                                                                 : ", found '" + peek().text + "'" ) );
    }

    Formula parse_implies()
    {
        Formula lhs = parse_or();
        if ( accept( Tok::Arrow ) )
            return implies( lhs, parse_implies() );
        return lhs;
    }

    Formula parse_or()
    {
        std::vector< Formula > parts{ parse_and() };
        while ( accept( Tok::Or ) )
            parts.push_back( parse_and() );
        return parts.size() == 1 ? parts.front() : Formula::make( Op::Or, std::move( parts ) );
    }

    Formula parse_and()
    {
        std::vector< Formula > parts{ parse_until() };
        while ( accept( Tok::And ) )
            parts.push_back( parse_until() );
        return parts.size() == 1 ? parts.front() : Formula::make( Op::And, std::move( parts ) );
    }

    Formula parse_until()
    {
        Formula lhs = parse_unary();
        if ( accept( Tok::KwU ) )
            return until( lhs, parse_until() );
        return lhs;
    }

    Formula parse_unary()
    {
        if ( auto a = try_atom() )
            return *a;
        if ( accept( Tok::Not ) )
            return neg( parse_unary() );
        if ( accept( Tok::KwX ) )
            return next( parse_unary() );
        if ( accept( Tok::KwF ) )
            return eventually( parse_unary() );
        if ( accept( Tok::KwG ) )
            return always( parse_unary() );
        return parse_primary();
    }

    Formula parse_primary()
    {
        if ( accept( Tok::LParen ) )
        {
            Formula f = parse_implies();
            expect( Tok::RParen, "')'" );
            return f;
        }
        if ( accept( Tok::KwTrue ) )
            return top();
        if ( accept( Tok::KwFalse ) )
            return bottom();
        if ( accept( Tok::KwLast ) )
            return last();
        if ( peek().kind == Tok::Ident )
        {
            const Token& t = take();
            VarId v = lookup( t.text );
            if ( _u[ v ].sort != Sort::Boolean )
            {
                --_pos;
                fail( "numeric variable '" + t.text + "' used as a formula (missing comparison?)" );
            }
            return bool_var( v );
        }
        fail( peek().kind == Tok::End ? "unexpected end of input" : "unexpected '" + peek().text + "'" );
    }

    VarId lookup( const std::string& name ) const
    {
        if ( auto v = _u.find( name ) )
            return *v;
        throw UndeclaredVariable( name );
    }

    // Backtracking attempt at `sum relop sum`; restores the position on failure.
    std::optional< Formula > try_atom()
    {
        const std::size_t save = _pos;
        auto lhs = try_sum();
        if ( !lhs )
        {
            _pos = save;
            return std::nullopt;
        }
        std::optional< Relation > rel;
        switch ( peek().kind )
        {
        case Tok::Le:
            rel = Relation::Le;
            break;
        case Tok::Lt:
            rel = Relation::Lt;
            break;
        case Tok::Eq:
            rel = Relation::Eq;
            break;
        case Tok::Gt:
            rel = Relation::Gt;
            break;
        case Tok::Ge:
            rel = Relation::Ge;
            break;
        default:
            _pos = save;
            return std::nullopt;
        }
        ++_pos;
        auto rhs = try_sum();
        if ( !rhs )
            fail( "expected arithmetic expression after '" + std::string{ relation_symbol( *rel ) } + "'" );

        std::vector< std::pair< Rational, TemporalTerm > > terms = lhs->terms;
        for ( const auto& [ c, t ] : rhs->terms )
            terms.emplace_back( -c, t );
        Rational constant = rhs->constant - lhs->constant;
        LinearPredicate p{ std::move( terms ), *rel, constant };
        return normalize( atom( std::move( p ) ) );
    }

    std::optional< LinearSum > try_sum()
    {
        LinearSum sum;
        bool negate = accept( Tok::Minus );
        if ( !try_product( sum, negate ) )
            return std::nullopt;
        while ( peek().kind == Tok::Plus || peek().kind == Tok::Minus )
        {
            negate = take().kind == Tok::Minus;
            if ( !try_product( sum, negate ) )
                fail( "expected a term after '" + std::string{ negate ? "-" : "+" } + "'" );
        }
        return sum;
    }

    bool try_product( LinearSum& sum, bool negate )
    {
        if ( peek().kind == Tok::Number )
        {
            Rational value = parse_rational( take().text );
            if ( accept( Tok::Slash ) )
            {
                if ( peek().kind != Tok::Number )
                    fail( "expected denominator" );
                Rational den = parse_rational( take().text );
                if ( den == 0 )
                    fail( "division by zero" );
                value /= den;
            }
            if ( negate )
                value = -value;
            if ( accept( Tok::Star ) )
            {
                auto term = try_term();
                if ( !term )
                    fail( "expected a variable after '*'" );
                sum.terms.emplace_back( value, *term );
            }
            else
                sum.constant += value;
            return true;
        }
        auto term = try_term();
        if ( !term )
            return false;
        sum.terms.emplace_back( Rational{ negate ? -1 : 1 }, *term );
        return true;
    }

    std::optional< TemporalTerm > try_term()
    {
        const std::size_t save = _pos;
        unsigned nexts = 0;
        while ( accept( Tok::KwX ) )
            ++nexts;
        if ( peek().kind != Tok::Ident )
        {
            _pos = save;
            return std::nullopt;
        }
        VarId v = lookup( peek().text );
        if ( _u[ v ].sort == Sort::Boolean )
        {
            _pos = save;
            return std::nullopt;
        }
        ++_pos;
        return TemporalTerm{ v, nexts };
    }

    std::vector< Token > _toks;
    std::size_t _pos = 0;
    const VariableUniverse& _u;
};

} // namespace

Formula parse_formula( std::string_view text, const VariableUniverse& universe )
{
    Parser p{ lex( text ), universe };
    return p.parse_all();
}

} // namespace ritmp::ltlk
