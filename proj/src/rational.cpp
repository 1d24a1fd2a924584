#include "ritmp/rational.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <system_error>

namespace ritmp
{

namespace
{

bool all_digits( std::string_view s )
{
    if ( s.empty() )
        return false;
    for ( char c : s )
        if ( c < '0' || c > '9' )
            return false;
    return true;
}

mpz_class pow10( long e )
{
    mpz_class r;
    mpz_ui_pow_ui( r.get_mpz_t(), 10, static_cast< unsigned long >( e ) );
    return r;
}

} // namespace

Rational parse_rational( std::string_view text )
{
    const std::string original{ text };
    bool negative = false;
    if ( !text.empty() && ( text.front() == '-' || text.front() == '+' ) )
    {
        negative = text.front() == '-';
        text.remove_prefix( 1 );
    }

    Rational value;
    if ( auto slash = text.find( '/' ); slash != std::string_view::npos )
    {
        auto num = text.substr( 0, slash );
        auto den = text.substr( slash + 1 );
        if ( !all_digits( num ) || !all_digits( den ) )
            throw std::invalid_argument( "malformed rational '" + original + "'" );
        mpz_class d{ std::string{ den }, 10 };
        if ( d == 0 )
            throw std::invalid_argument( "zero denominator in '" + original + "'" );
        value = Rational{ mpz_class{ std::string{ num }, 10 }, d };
    }
    else
    {
        long exponent = 0;
        if ( auto e = text.find_first_of( "eE" ); e != std::string_view::npos )
        {
            auto exp_text = std::string{ text.substr( e + 1 ) };
            char* end = nullptr;
            exponent = std::strtol( exp_text.c_str(), &end, 10 );
            if ( exp_text.empty() || *end != '\0' )
                throw std::invalid_argument( "malformed exponent in '" + original + "'" );
            text = text.substr( 0, e );
        }
        std::string_view int_part = text;
        std::string_view frac_part;
        if ( auto dot = text.find( '.' ); dot != std::string_view::npos )
        {
            int_part = text.substr( 0, dot );
            frac_part = text.substr( dot + 1 );
        }
        if ( ( int_part.empty() && frac_part.empty() ) || ( !int_part.empty() && !all_digits( int_part ) ) ||
             ( !frac_part.empty() && !all_digits( frac_part ) ) )
            throw std::invalid_argument( "malformed number '" + original + "'" );
        std::string digits = std::string{ int_part } + std::string{ frac_part };
        mpz_class num{ digits.empty() ? std::string{ "0" } : digits, 10 };
        long scale = static_cast< long >( frac_part.size() ) - exponent;
        if ( scale >= 0 )
            value = Rational{ num, pow10( scale ) };
        else
            value = Rational{ num * pow10( -scale ) };
    }
    value.canonicalize();
    return negative ? Rational{ -value } : value;
}

std::string rational_to_string( const Rational& q )
{
    return q.get_str();
}

std::string rational_to_decimal_or_fraction( const Rational& q )
{
    mpz_class den = q.get_den();
    int twos = 0;
    int fives = 0;
    while ( den % 2 == 0 )
    {
        den /= 2;
        ++twos;
    }
    while ( den % 5 == 0 )
    {
        den /= 5;
        ++fives;
    }
    if ( den != 1 )
        return q.get_str();
    if ( twos == 0 && fives == 0 )
        return q.get_num().get_str();

    const int digits = std::max( twos, fives );
    mpz_class scaled = q.get_num() * pow10( digits ) / q.get_den();
    const bool negative = scaled < 0;
    if ( negative )
        scaled = -scaled;
    std::string s = scaled.get_str();
    if ( static_cast< int >( s.size() ) <= digits )
        s.insert( 0, static_cast< std::size_t >( digits ) - s.size() + 1, '0' );
    s.insert( s.size() - static_cast< std::size_t >( digits ), "." );
    return negative ? "-" + s : s;
}

Rational rational_from_double( double v )
{
    if ( !std::isfinite( v ) )
        throw std::invalid_argument( "non-finite value cannot be made rational" );
    char buf[ 64 ];
    auto [ end, ec ] = std::to_chars( buf, buf + sizeof buf, v );
    if ( ec != std::errc{} )
        throw std::invalid_argument( "double formatting failed" );
    return parse_rational( std::string_view{ buf, static_cast< std::size_t >( end - buf ) } );
}

double to_double( const Rational& q )
{
    return q.get_d();
}

Rational sqrt_upper( const Rational& q )
{
    if ( q < 0 )
        throw std::domain_error( "sqrt of negative rational" );
    mpz_class num = q.get_num();
    mpz_class den = q.get_den();
    if ( mpz_perfect_square_p( num.get_mpz_t() ) && mpz_perfect_square_p( den.get_mpz_t() ) )
    {
        mpz_class rn;
        mpz_class rd;
        mpz_sqrt( rn.get_mpz_t(), num.get_mpz_t() );
        mpz_sqrt( rd.get_mpz_t(), den.get_mpz_t() );
        return Rational{ rn, rd };
    }
    // ceil(sqrt(q * 2^60)) / 2^30 is an upper bound within 2^-30 of the true root.
    mpz_class scale = mpz_class{ 1 } << 60;
    mpz_class scaled_num = num * scale;
    mpz_class radicand = ( scaled_num + den - 1 ) / den;
    mpz_class root;
    mpz_sqrt( root.get_mpz_t(), radicand.get_mpz_t() );
    if ( root * root < radicand )
        root += 1;
    Rational r{ root, mpz_class{ 1 } << 30 };
    r.canonicalize();
    return r;
}

bool is_integer( const Rational& q )
{
    return q.get_den() == 1;
}

} // namespace ritmp
