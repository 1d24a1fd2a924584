#pragma once

#include "ritmp/ltlk/formula.hpp"
#include "ritmp/ltlk/trace.hpp"

namespace ritmp::ltlk
{

// Direct bounded-prefix semantics over exact rationals. The last state self-loops,
// so a next-read at k reads min(k + 1, K). Until is the bounded exists-i/forall-j
// clause, Eventually is "true U f", Always is "!F !f", Last holds only at K.

Rational eval_term( const TemporalTerm& term, const BoundedTrace& trace, std::size_t k );

bool eval_atom( const AtomicProposition& atom, const BoundedTrace& trace, std::size_t k );

bool eval_formula( const Formula& phi, const BoundedTrace& trace, std::size_t k );

inline bool satisfies_prefix( const Formula& phi, const BoundedTrace& trace )
{
    return eval_formula( phi, trace, 0 );
}

} // namespace ritmp::ltlk
