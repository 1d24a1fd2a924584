#pragma once

#include "ritmp/ltlk/formula.hpp"
#include "ritmp/ltlk/universe.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace ritmp::ltlk
{

class ParseError : public std::runtime_error
{
public:
    ParseError( const std::string& message, std::size_t line, std::size_t column );

    [[nodiscard]] std::size_t line() const { return _line; }
    [[nodiscard]] std::size_t column() const { return _column; }

private:
    std::size_t _line;
    std::size_t _column;
};

class UndeclaredVariable : public std::runtime_error
{
public:
    explicit UndeclaredVariable( std::string name );
    [[nodiscard]] const std::string& name() const { return _name; }

private:
    std::string _name;
};

// Grammar (precedence: unary > U > && > || > ->):
//   formula := or ( '->' formula )?
//   or      := and ( '||' and )*
//   and     := until ( '&&' until )*
//   until   := unary ( 'U' until )?
//   unary   := atom | ( '!' | 'X' | 'F' | 'G' ) unary | primary
//   primary := '(' formula ')' | 'true' | 'false' | 'last' | <boolean variable>
//   atom    := sum relop sum          relop in <= < = > >=
//   sum     := ['-'] product ( ('+'|'-') product )*
//   product := number [ '*' term ] | term        number := digits[.digits] [ '/' digits ]
//   term    := 'X'* <numeric variable>
Formula parse_formula( std::string_view text, const VariableUniverse& universe );

} // namespace ritmp::ltlk
