#pragma once

#include "ritmp/rational.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ritmp::ltlk
{

enum class Sort
{
    Real,
    Integer,
    Boolean
};

std::string_view sort_name( Sort s );

using VarId = std::size_t;

struct VarDecl
{
    std::string name;
    Sort sort = Sort::Real;
    std::optional< Rational > lo;
    std::optional< Rational > hi;
};

/// Declared variables of a specification. Booleans are valued 0/1 in traces.
class VariableUniverse
{
public:
    VarId add( std::string name, Sort sort, std::optional< Rational > lo = std::nullopt,
               std::optional< Rational > hi = std::nullopt );

    [[nodiscard]] std::optional< VarId > find( std::string_view name ) const;
    [[nodiscard]] VarId at( std::string_view name ) const;

    [[nodiscard]] const VarDecl& operator[]( VarId id ) const { return _decls.at( id ); }
    [[nodiscard]] std::size_t size() const { return _decls.size(); }
    [[nodiscard]] const std::vector< VarDecl >& decls() const { return _decls; }

    /// True when every integer variable carries both bounds and there are no reals.
    [[nodiscard]] bool finite_domain() const;

    /// Checks sort and bound membership of a value for `id`.
    [[nodiscard]] bool admits( VarId id, const Rational& value ) const;

    friend bool operator==( const VariableUniverse& a, const VariableUniverse& b );

private:
    std::vector< VarDecl > _decls;
    std::unordered_map< std::string, VarId > _index;
};

} // namespace ritmp::ltlk
