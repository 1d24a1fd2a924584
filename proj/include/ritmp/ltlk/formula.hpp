#pragma once

#include "ritmp/ltlk/universe.hpp"
#include "ritmp/rational.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ritmp::ltlk
{

enum class Relation
{
    Le,
    Lt,
    Eq,
    Gt,
    Ge
};

std::string_view relation_symbol( Relation r );
bool holds( const Rational& lhs, Relation r, const Rational& rhs );

/// A variable read under `nexts` next-operators.
struct TemporalTerm
{
    VarId var = 0;
    unsigned nexts = 0;

    friend bool operator==( const TemporalTerm&, const TemporalTerm& ) = default;
};

struct BoolAtom
{
    TemporalTerm term;

    friend bool operator==( const BoolAtom&, const BoolAtom& ) = default;
};

/// sum_i coeff_i * term_i  rel  rhs
struct LinearPredicate
{
    std::vector< std::pair< Rational, TemporalTerm > > terms;
    Relation rel = Relation::Le;
    Rational rhs;

    friend bool operator==( const LinearPredicate&, const LinearPredicate& ) = default;
};

using AtomicProposition = std::variant< BoolAtom, LinearPredicate >;

enum class Op
{
    True,
    False,
    Atom,
    Not,
    And,
    Or,
    Implies,
    Next,
    Until,
    Eventually,
    Always,
    Last
};

class Formula;

struct FormulaNode
{
    Op op;
    AtomicProposition atom;
    std::vector< Formula > children;
};

/// Immutable, shareable formula handle. And/Or are n-ary.
class Formula
{
public:
    Formula();

    [[nodiscard]] Op op() const { return _node->op; }
    [[nodiscard]] const AtomicProposition& atom() const { return _node->atom; }
    [[nodiscard]] const std::vector< Formula >& children() const { return _node->children; }
    [[nodiscard]] const Formula& child( std::size_t i = 0 ) const { return _node->children.at( i ); }
    [[nodiscard]] const FormulaNode* node() const { return _node.get(); }

    friend bool operator==( const Formula& a, const Formula& b );

    static Formula make( Op op, std::vector< Formula > children, AtomicProposition atom = BoolAtom{} );

private:
    explicit Formula( std::shared_ptr< const FormulaNode > node ) : _node{ std::move( node ) } {}
    std::shared_ptr< const FormulaNode > _node;
};

Formula top();
Formula bottom();
Formula last();
Formula atom( AtomicProposition a );
Formula bool_var( VarId v, unsigned nexts = 0 );
Formula linear( std::vector< std::pair< Rational, TemporalTerm > > terms, Relation rel, Rational rhs );
Formula neg( Formula f );
Formula conj( std::vector< Formula > fs );
Formula disj( std::vector< Formula > fs );
Formula implies( Formula a, Formula b );
Formula next( Formula f );
Formula until( Formula a, Formula b );
Formula eventually( Formula f );
Formula always( Formula f );

/// x = value (bool variables: x or !x).
Formula equals( const VariableUniverse& u, VarId var, const Rational& value, unsigned nexts = 0 );

std::string to_string( const Formula& f, const VariableUniverse& u );

/// Canonical structure: boolean atoms with next-reads become Next chains, linear
/// predicates merge duplicate terms and drop zero coefficients, variable-free
/// predicates fold to true/false.
Formula normalize( const Formula& f );

std::size_t depth( const Formula& f );
std::size_t size( const Formula& f );

/// 64-bit FNV-1a of the printed form.
std::uint64_t fingerprint( const Formula& f, const VariableUniverse& u );

} // namespace ritmp::ltlk
