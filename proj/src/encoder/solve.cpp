#include "ritmp/encoder/encoder.hpp"

#include <cctype>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fcntl.h>
#include <filesystem>
#include <fstream>
#include <poll.h>
#include <set>
#include <spawn.h>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace ritmp::encoder
{

using namespace ritmp::ltlk;

SolverConfig SolverConfig::from_environment()
{
    SolverConfig cfg;
    const char* env = std::getenv( "LTLK_SOLVER_CMD" );
    if ( env == nullptr || *env == '\0' )
        return cfg;
    std::istringstream words{ env };
    std::vector< std::string > parts;
    for ( std::string w; words >> w; )
        parts.push_back( w );
    if ( parts.empty() )
        return cfg;
    cfg.cmd = parts.front();
    cfg.args.assign( parts.begin() + 1, parts.end() );
    if ( parts.size() == 1 && std::filesystem::path{ cfg.cmd }.filename() == "z3" )
        cfg.args = { "-in" };
    return cfg;
}

namespace
{

// Minimal S-expression reader for solver output.
struct SExpr
{
    std::string atom;
    std::vector< SExpr > list;
    bool is_list = false;
};

class Reader
{
public:
    explicit Reader( std::string_view text ) : _s{ text } {}

    bool at_end()
    {
        skip();
        return _i >= _s.size();
    }

    SExpr read()
    {
        skip();
        if ( _i >= _s.size() )
            throw std::runtime_error( "unexpected end of solver output" );
        if ( _s[ _i ] == '(' )
        {
            ++_i;
            SExpr e;
            e.is_list = true;
            for ( ;; )
            {
                skip();
                if ( _i >= _s.size() )
                    throw std::runtime_error( "unbalanced parenthesis in solver output" );
                if ( _s[ _i ] == ')' )
                {
                    ++_i;
                    return e;
                }
                e.list.push_back( read() );
            }
        }
        if ( _s[ _i ] == ')' )
            throw std::runtime_error( "unexpected ')' in solver output" );
        if ( _s[ _i ] == '|' )
        {
            auto end = _s.find( '|', _i + 1 );
            if ( end == std::string_view::npos )
                throw std::runtime_error( "unterminated quoted symbol" );
            SExpr e{ std::string{ _s.substr( _i + 1, end - _i - 1 ) }, {}, false };
            _i = end + 1;
            return e;
        }
        if ( _s[ _i ] == '"' )
        {
            std::size_t j = _i + 1;
            while ( j < _s.size() && !( _s[ j ] == '"' && ( j + 1 >= _s.size() || _s[ j + 1 ] != '"' ) ) )
                j += _s[ j ] == '"' ? 2 : 1;
            SExpr e{ std::string{ _s.substr( _i, j + 1 - _i ) }, {}, false };
            _i = j + 1;
            return e;
        }
        std::size_t j = _i;
        while ( j < _s.size() && !std::isspace( static_cast< unsigned char >( _s[ j ] ) ) && _s[ j ] != '(' &&
                _s[ j ] != ')' )
            ++j;
        SExpr e{ std::string{ _s.substr( _i, j - _i ) }, {}, false };
        _i = j;
        return e;
    }

private:
    void skip()
    {
        while ( _i < _s.size() )
        {
            if ( std::isspace( static_cast< unsigned char >( _s[ _i ] ) ) )
                ++_i;
            else if ( _s[ _i ] == ';' )
                while ( _i < _s.size() && _s[ _i ] != '\n' )
                    ++_i;
            else
                break;
        }
    }

    std::string_view _s;
    std::size_t _i = 0;
};

Rational value_of( const SExpr& e )
{
    if ( !e.is_list )
    {
        if ( e.atom == "true" )
            return 1;
        if ( e.atom == "false" )
            return 0;
        return parse_rational( e.atom );
    }
    if ( e.list.size() == 2 && e.list[ 0 ].atom == "-" )
        return -value_of( e.list[ 1 ] );
    if ( e.list.size() == 3 && e.list[ 0 ].atom == "/" )
    {
        Rational den = value_of( e.list[ 2 ] );
        if ( den == 0 )
            throw std::runtime_error( "zero denominator in model value" );
        return value_of( e.list[ 1 ] ) / den;
    }
    if ( e.list.size() == 2 && e.list[ 0 ].atom == "to_real" )
        return value_of( e.list[ 1 ] );
    throw std::runtime_error( "unsupported model value" );
}

std::string unquote( const std::string& symbol )
{
    if ( symbol.size() >= 2 && symbol.front() == '|' && symbol.back() == '|' )
        return symbol.substr( 1, symbol.size() - 2 );
    return symbol;
}

// z3: (model? (define-fun x () Real v) ...); yices: (= x v) per line.
void read_bindings( const SExpr& e, std::map< std::string, Rational >& model )
{
    if ( !e.is_list )
        return;
    if ( e.list.size() == 5 && e.list[ 0 ].atom == "define-fun" && e.list[ 2 ].is_list && e.list[ 2 ].list.empty() )
    {
        model[ e.list[ 1 ].atom ] = value_of( e.list[ 4 ] );
        return;
    }
    if ( e.list.size() == 3 && e.list[ 0 ].atom == "=" && !e.list[ 1 ].is_list )
    {
        model[ e.list[ 1 ].atom ] = value_of( e.list[ 2 ] );
        return;
    }
    for ( const auto& c : e.list )
        if ( c.is_list )
            read_bindings( c, model );
}

} // namespace

SolveResult parse_solver_output( const std::string& raw, const ConstraintSystem& cs )
{
    SolveResult r;
    r.raw = raw;
    try
    {
        Reader rd{ raw };
        if ( rd.at_end() )
            throw ProtocolError( "solver produced no answer", raw );
        SExpr head = rd.read();
        if ( head.is_list )
            throw ProtocolError( "solver answered with an S-expression instead of a status", raw );
        if ( head.atom == "unsat" )
        {
            r.status = Status::Unsat;
            return r;
        }
        if ( head.atom == "unknown" )
        {
            r.status = Status::Unknown;
            return r;
        }
        if ( head.atom != "sat" )
            throw ProtocolError( "unexpected solver status '" + head.atom + "'", raw );
        r.status = Status::Sat;
        while ( !rd.at_end() )
        {
            SExpr e = rd.read();
            if ( e.is_list && !e.list.empty() && e.list[ 0 ].atom == "error" )
                throw ProtocolError( "solver reported an error after sat", raw );
            read_bindings( e, r.model );
        }
    }
    catch ( const ProtocolError& )
    {
        throw;
    }
    catch ( const std::exception& ex )
    {
        throw ProtocolError( std::string{ "cannot parse solver output: " } + ex.what(), raw );
    }
    for ( const auto& d : cs.declarations )
    {
        std::string name = unquote( d.symbol );
        if ( r.model.count( name ) )
            continue;
        if ( d.referenced )
            throw ProtocolError( "model lacks symbol '" + name + "'", raw );
        r.model[ name ] = 0;
    }
    return r;
}

namespace
{

struct Pipe
{
    int fd[ 2 ] = { -1, -1 };
    ~Pipe()
    {
        for ( int f : fd )
            if ( f >= 0 )
                ::close( f );
    }
    void close( int i )
    {
        if ( fd[ i ] >= 0 )
            ::close( fd[ i ] );
        fd[ i ] = -1;
    }
};

void make_pipe( Pipe& p )
{
    if ( ::pipe2( p.fd, O_CLOEXEC ) != 0 )
        throw BackendError( std::string{ "pipe: " } + std::strerror( errno ), "" );
}

} // namespace

SolveResult solve( const ConstraintSystem& cs, const SolverConfig& config )
{
    // A backend that dies mid-write must surface as EPIPE, not kill the caller.
    static const bool sigpipe_ignored = ( std::signal( SIGPIPE, SIG_IGN ), true );
    (void)sigpipe_ignored;
    const std::string script = emit_smtlib( cs );
    std::vector< std::string > argv_s{ config.cmd };
    argv_s.insert( argv_s.end(), config.args.begin(), config.args.end() );

    std::filesystem::path temp;
    if ( config.use_temp_file )
    {
        char name[] = "/tmp/ritmp-XXXXXX.smt2";
        int fd = ::mkstemps( name, 5 );
        if ( fd < 0 )
            throw BackendError( std::string{ "temp file: " } + std::strerror( errno ), "" );
        ::close( fd );
        temp = name;
        std::ofstream{ temp } << script;
        argv_s.push_back( temp.string() );
    }
    struct Cleanup
    {
        std::filesystem::path p;
        ~Cleanup()
        {
            if ( !p.empty() )
            {
                std::error_code ec;
                std::filesystem::remove( p, ec );
            }
        }
    } cleanup{ temp };

    std::vector< char* > argv;
    for ( auto& a : argv_s )
        argv.push_back( a.data() );
    argv.push_back( nullptr );

    Pipe in, out;
    make_pipe( in );
    make_pipe( out );

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init( &actions );
    posix_spawn_file_actions_adddup2( &actions, in.fd[ 0 ], STDIN_FILENO );
    posix_spawn_file_actions_adddup2( &actions, out.fd[ 1 ], STDOUT_FILENO );
    posix_spawn_file_actions_adddup2( &actions, out.fd[ 1 ], STDERR_FILENO );

    const auto start = std::chrono::steady_clock::now();
    pid_t pid = 0;
    int rc = posix_spawnp( &pid, config.cmd.c_str(), &actions, nullptr, argv.data(), environ );
    posix_spawn_file_actions_destroy( &actions );
    if ( rc != 0 )
        throw BackendError( "cannot launch solver '" + config.cmd + "': " + std::strerror( rc ), "" );
    in.close( 0 );
    out.close( 1 );

    std::string input = config.use_temp_file ? std::string{} : script;
    std::size_t written = 0;
    if ( input.empty() )
        in.close( 1 );
    else
        ::fcntl( in.fd[ 1 ], F_SETFL, O_NONBLOCK );

    std::string raw;
    bool timed_out = false;
    const auto deadline = start + std::chrono::duration< double >( config.timeout_s );
    for ( ;; )
    {
        pollfd fds[ 2 ];
        nfds_t n = 0;
        fds[ n++ ] = { out.fd[ 0 ], POLLIN, 0 };
        if ( in.fd[ 1 ] >= 0 )
            fds[ n++ ] = { in.fd[ 1 ], POLLOUT, 0 };
        auto left = std::chrono::duration_cast< std::chrono::milliseconds >( deadline - std::chrono::steady_clock::now() );
        if ( left.count() <= 0 )
        {
            timed_out = true;
            break;
        }
        int ready = ::poll( fds, n, static_cast< int >( std::min< long long >( left.count(), 1000 ) ) );
        if ( ready < 0 && errno != EINTR )
            break;
        if ( ready <= 0 )
            continue;
        if ( n == 2 && ( fds[ 1 ].revents & ( POLLOUT | POLLERR | POLLHUP ) ) )
        {
            ssize_t w = ::write( in.fd[ 1 ], input.data() + written, input.size() - written );
            if ( w > 0 )
                written += static_cast< std::size_t >( w );
            if ( w < 0 && errno != EAGAIN )
                in.close( 1 );
            if ( written == input.size() )
                in.close( 1 );
        }
        if ( fds[ 0 ].revents & ( POLLIN | POLLHUP | POLLERR ) )
        {
            char buf[ 8192 ];
            ssize_t r = ::read( out.fd[ 0 ], buf, sizeof buf );
            if ( r > 0 )
                raw.append( buf, static_cast< std::size_t >( r ) );
            else if ( r == 0 || errno != EINTR )
                break;
        }
    }
    in.close( 1 );
    if ( timed_out )
        ::kill( pid, SIGKILL );
    int wstatus = 0;
    while ( ::waitpid( pid, &wstatus, 0 ) < 0 && errno == EINTR )
    {
    }
    const double seconds = std::chrono::duration< double >( std::chrono::steady_clock::now() - start ).count();

    if ( timed_out )
    {
        SolveResult r;
        r.status = Status::Unknown;
        r.seconds = seconds;
        r.raw = raw;
        return r;
    }
    if ( WIFSIGNALED( wstatus ) )
        throw BackendError( "solver terminated by signal " + std::to_string( WTERMSIG( wstatus ) ), raw );
    if ( WIFEXITED( wstatus ) && WEXITSTATUS( wstatus ) == 127 && raw.find( "sat" ) == std::string::npos )
        throw BackendError( "solver '" + config.cmd + "' could not be executed", raw );
    SolveResult r = parse_solver_output( raw, cs );
    r.seconds = seconds;
    return r;
}

BoundedTrace decode_model( const SolveResult& result, const VariableUniverse& u, std::size_t K )
{
    if ( result.status != Status::Sat )
        throw std::invalid_argument( "decode_model needs a SAT result" );
    BoundedTrace t{ K, u.size() };
    for ( VarId v = 0; v < u.size(); ++v )
        for ( std::size_t k = 0; k <= K; ++k )
        {
            std::string name = state_symbol( u[ v ].name, k );
            if ( name.front() == '|' )
                name = name.substr( 1, name.size() - 2 );
            auto it = result.model.find( name );
            if ( it == result.model.end() )
                throw MissingSymbol( "model has no value for '" + name + "'" );
            t.value( v, k ) = it->second;
        }
    return t;
}

} // namespace ritmp::encoder
