#pragma once

#include "ritmp/ltlk/formula.hpp"
#include "ritmp/ltlk/trace.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ritmp::encoder
{

struct Declaration
{
    std::string symbol;
    ltlk::Sort sort = ltlk::Sort::Real;
    /// False when no assertion mentions the symbol; the backend may then omit it from the model.
    bool referenced = false;
};

/// Quantifier-free linear arithmetic over step-indexed copies of the universe.
struct ConstraintSystem
{
    std::size_t K = 0;
    std::string logic;
    std::vector< Declaration > declarations;
    std::vector< std::string > assertions;
    std::vector< std::string > warnings;
};

/// `x__k`, quoted with |...| when the name is not a simple SMT-LIB symbol.
std::string state_symbol( const std::string& name, std::size_t k );

/// One label per (subformula, step), defined by its one-step unrolling; Next at K reads K.
ConstraintSystem encode( const ltlk::Formula& phi, std::size_t K, const ltlk::VariableUniverse& u );

std::string emit_smtlib( const ConstraintSystem& cs );

enum class Status
{
    Sat,
    Unsat,
    Unknown
};

std::string_view status_name( Status s );

struct SolverConfig
{
    std::string cmd = "z3";
    std::vector< std::string > args{ "-in" };
    double timeout_s = 60;
    /// Pass the script as a trailing file argument instead of standard input.
    bool use_temp_file = false;

    /// Default config with LTLK_SOLVER_CMD applied when set. A yices command drops the z3 flag.
    static SolverConfig from_environment();
};

struct SolveResult
{
    Status status = Status::Unknown;
    /// Symbol (unquoted) to value; booleans are 0/1.
    std::map< std::string, Rational > model;
    double seconds = 0;
    std::string raw;
};

class BackendError : public std::runtime_error
{
public:
    BackendError( const std::string& what, std::string raw ) : std::runtime_error{ what }, _raw{ std::move( raw ) } {}
    [[nodiscard]] const std::string& raw() const { return _raw; }

private:
    std::string _raw;
};

class ProtocolError : public std::runtime_error
{
public:
    ProtocolError( const std::string& what, std::string raw ) : std::runtime_error{ what }, _raw{ std::move( raw ) } {}
    [[nodiscard]] const std::string& raw() const { return _raw; }

private:
    std::string _raw;
};

class MissingSymbol : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Parses the backend's answer; exposed for tests. Declared but unreferenced symbols the
/// model omits are filled with 0/false.
SolveResult parse_solver_output( const std::string& raw, const ConstraintSystem& cs );

/// One-shot run of the backend on the emitted script; UNKNOWN on timeout.
SolveResult solve( const ConstraintSystem& cs, const SolverConfig& config );

ltlk::BoundedTrace decode_model( const SolveResult& result, const ltlk::VariableUniverse& u, std::size_t K );

} // namespace ritmp::encoder
