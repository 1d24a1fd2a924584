#include "ritmp/io/artifacts.hpp"
#include "ritmp/io/scenario.hpp"
#include "ritmp/simkit/dynamics.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace ritmp;
using nlohmann::json;

namespace
{

enum Exit
{
    Ok = 0,
    Unrealizable = 1,
    InputError = 2,
    BackendFailure = 3
};

struct InputProblem : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct Options
{
    std::string scenario;
    std::string out = "out";
    std::size_t kmax = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t jobs = 1;
    double timeout = 0;
    bool dot = false;
    std::string from, to, trace, plan;
};

fs::path stage_dir( const Options& o, const io::Scenario& s, const std::string& stage )
{
    auto d = fs::path( o.out ) / s.name / stage;
    fs::create_directories( d );
    return d;
}

fs::path upstream( const Options& o, const io::Scenario& s, const std::string& stage, const std::string& file )
{
    auto p = fs::path( o.out ) / s.name / stage / file;
    if ( !fs::exists( p ) )
        throw InputProblem( "missing " + p.string() + "; run `ritmp " + stage + " --scenario " + o.scenario +
                            ( o.out != "out" ? " --out " + o.out : "" ) + "` first" );
    return p;
}

json read_json( const fs::path& p )
{
    std::ifstream in( p );
    if ( !in )
        throw InputProblem( "cannot open " + p.string() );
    try
    {
        return json::parse( in );
    }
    catch ( const json::parse_error& e )
    {
        throw InputProblem( p.string() + ": " + e.what() );
    }
}

void write_text( const fs::path& p, const std::string& text )
{
    std::ofstream out( p, std::ios::binary );
    out << text;
    if ( !out )
        throw std::runtime_error( "cannot write " + p.string() );
    std::cout << "wrote " << p.string() << "\n";
}

io::Scenario load( const Options& o )
{
    auto s = io::load_scenario( o.scenario );
    if ( o.kmax )
        s.K_max = o.kmax;
    if ( o.seed_set )
        s.seed = o.seed;
    if ( o.timeout > 0 )
        s.solver.timeout_s = o.timeout;
    return s;
}

std::size_t location( const io::Scenario& s, const std::string& name )
{
    for ( std::size_t i = 0; i < s.mission.locations.size(); ++i )
        if ( s.mission.locations[ i ].name == name )
            return i;
    throw InputProblem( "no location named '" + name + "'" );
}

// Robot-only move between two locations with objects left where the scenario puts them.
itmp::PlanRequest travel_request( const io::Scenario& s, std::size_t from, std::size_t to )
{
    itmp::PlanRequest r;
    r.workspace = s.workspace;
    r.cobstacles = s.cobstacles;
    r.K_max = s.K_max;
    auto w = taskspec::warehouse_actions( s.mission.locations, s.mission.objects );
    const auto& a = s.mission.locations[ from ];
    taskspec::set_initial( w, a.x, a.y, a.theta.value_or( Rational{ 0 } ), s.placement );
    taskspec::set_goal( w, to, s.placement );
    r.task = w.task;
    return r;
}

itmp::PlanRequest edge_request( const io::Scenario& s, const missiongame::MissionGraph& g, std::size_t from,
                                std::size_t to )
{
    itmp::PlanRequest r;
    r.workspace = s.workspace;
    r.cobstacles = s.cobstacles;
    r.K_max = s.K_max;
    r.task = missiongame::edge_task( g.config, g.states[ from ], g.states[ to ] ).task;
    return r;
}

int cmd_plan( const Options& o )
{
    auto s = load( o );
    const auto from = o.from.empty() ? s.home : location( s, o.from );
    if ( o.to.empty() )
        throw InputProblem( "plan needs --to LOCATION" );
    const auto to = location( s, o.to );
    auto req = travel_request( s, from, to );
    auto res = itmp::itmp( req, s.solver );
    const auto dir = stage_dir( o, s, "plan" );
    const std::string stem = "plan_" + s.mission.locations[ from ].name + "_" + s.mission.locations[ to ].name;
    write_text( dir / ( stem + ".smt2" ), res.smt_script );
    for ( const auto& a : res.attempts )
        std::cout << "K=" << a.K << " " << encoder::status_name( a.status ) << "\n";
    if ( res.status == encoder::Status::Unknown )
    {
        std::cerr << "solver returned unknown: " << res.diagnostic << "\n";
        return BackendFailure;
    }
    if ( !res.plan )
    {
        std::cerr << res.diagnostic << "\n";
        return Unrealizable;
    }
    auto report = itmp::validate_plan( *res.plan, req );
    json j = io::plan_to_json( *res.plan );
    j = { { "schema_version", io::artifact_schema_version },
          { "kind", "plan" },
          { "scenario", s.name },
          { "request", { { "from", s.mission.locations[ from ].name }, { "to", s.mission.locations[ to ].name } } },
          { "valid", report.ok },
          { "plan", j } };
    write_text( dir / ( stem + ".json" ), j.dump( 2 ) + "\n" );
    return report.ok ? Ok : Unrealizable;
}

int cmd_graph( const Options& o )
{
    auto s = load( o );
    auto g = missiongame::synth_mission_graph( s.mission, s.env, s.workspace, s.cobstacles, s.synthesis( o.jobs ) );
    const auto dir = stage_dir( o, s, "graph" );
    write_text( dir / "graph.json", io::graph_to_json( g, s.name ).dump( 2 ) + "\n" );
    if ( o.dot )
        write_text( dir / "graph.dot", missiongame::to_dot( g ) );
    std::cout << g.states.size() << " states, " << g.candidates << " candidate tasks, " << g.system_edges.size()
              << " system edges, " << g.env_edges.size() << " environment edges\n";
    if ( !g.unknown_edges.empty() )
    {
        std::cerr << g.unknown_edges.size() << " candidate tasks ended UNKNOWN and were left out\n";
        return BackendFailure;
    }
    return Ok;
}

missiongame::MissionGraph load_graph( const Options& o, const io::Scenario& s )
{
    return io::graph_from_json( read_json( upstream( o, s, "graph", "graph.json" ) ), s );
}

int cmd_strategy( const Options& o )
{
    auto s = load( o );
    auto g = load_graph( o, s );
    auto st = missiongame::solve_game( g, s.condition );
    const auto dir = stage_dir( o, s, "strategy" );
    if ( !st )
    {
        json j = { { "schema_version", io::artifact_schema_version },
                   { "kind", "strategy" },
                   { "scenario", s.name },
                   { "realizable", false } };
        write_text( dir / "strategy.json", j.dump( 2 ) + "\n" );
        std::cerr << "unrealizable: some initial state is not winning\n";
        return Unrealizable;
    }
    auto j = io::strategy_to_json( g, s.condition, *st, s.name );
    j[ "realizable" ] = true;
    write_text( dir / "strategy.json", j.dump( 2 ) + "\n" );
    std::cout << "realizable; memory " << st->strategy.memory_size << ", " << j[ "transducer" ].size()
              << " transducer rows\n";
    return Ok;
}

missiongame::MissionStrategy load_strategy( const Options& o, const io::Scenario& s, const missiongame::MissionGraph& g )
{
    auto j = read_json( upstream( o, s, "strategy", "strategy.json" ) );
    if ( !j.value( "realizable", false ) )
        throw InputProblem( "the stored strategy is unrealizable; nothing to simulate" );
    return io::strategy_from_json( j, g );
}

std::vector< double > radii( const io::Scenario& s )
{
    std::vector< double > r;
    for ( const auto& m : s.moving )
        r.push_back( m.radius );
    return r;
}

int cmd_simulate( const Options& o )
{
    auto s = load( o );
    auto g = load_graph( o, s );
    auto st = load_strategy( o, s, g );
    auto cfg = s.episode();
    cfg.start_state = g.find( s.initial_state() );
    auto r = simkit::run_episode( g, s.condition, st, cfg );
    const auto dir = stage_dir( o, s, "simulate" );
    std::ostringstream csv;
    simkit::write_csv( r.trace, csv );
    write_text( dir / "trace.csv", csv.str() );
    json events = json::array();
    for ( const auto& e : r.events )
        events.push_back( { { "t", e.t }, { "action", e.action }, { "location", e.location } } );
    json states = json::array();
    for ( auto m : r.mission_states )
        states.push_back( missiongame::to_string( g.states[ m ], g.config ) );
    json j = { { "schema_version", io::artifact_schema_version },
               { "kind", "episode" },
               { "scenario", s.name },
               { "seed", s.seed },
               { "status", simkit::episode_status_name( r.status ) },
               { "verdict", missiongame::verdict_name( r.verdict ) },
               { "detail", r.detail },
               { "duration", r.trace.rows.size() * r.trace.dt },
               { "override_ticks", r.override_ticks },
               { "moving_collisions", simkit::moving_collisions( r.trace, radii( s ), s.loop.safety.D_s ) },
               { "nonholonomic_residual", simkit::nonholonomic_residual( r.trace ) },
               { "system_actions", r.system_actions },
               { "mission_states", states },
               { "events", events } };
    write_text( dir / "episode.json", j.dump( 2 ) + "\n" );
    std::cout << "status " << j[ "status" ].get< std::string >() << ", verdict " << j[ "verdict" ].get< std::string >()
              << ", override ticks " << r.override_ticks << "\n";
    return r.status == simkit::EpisodeStatus::Completed && r.verdict == missiongame::Verdict::Satisfied ? Ok
                                                                                                     : Unrealizable;
}

simkit::TraceRecord read_trace( const fs::path& p )
{
    std::ifstream in( p );
    if ( !in )
        throw InputProblem( "cannot open " + p.string() );
    try
    {
        return simkit::read_csv( in );
    }
    catch ( const std::runtime_error& e )
    {
        throw InputProblem( p.string() + ": " + e.what() );
    }
}

int cmd_render( const Options& o )
{
    auto s = load( o );
    std::optional< simkit::TraceRecord > trace;
    fs::path tp = o.trace.empty() ? fs::path( o.out ) / s.name / "simulate" / "trace.csv" : fs::path( o.trace );
    if ( fs::exists( tp ) )
        trace = read_trace( tp );
    else if ( !o.trace.empty() )
        throw InputProblem( "missing trace " + tp.string() );
    std::optional< geometry::Tunnel > tunnel;
    if ( !o.plan.empty() )
    {
        auto j = read_json( o.plan );
        tunnel = io::plan_from_json( j.contains( "plan" ) ? j.at( "plan" ) : j ).P;
    }
    const auto dir = stage_dir( o, s, "render" );
    write_text( dir / "scene.svg", io::render_svg( s, trace ? &*trace : nullptr, tunnel ? &*tunnel : nullptr ) );
    return Ok;
}

struct Report
{
    int failures = 0;
    int checks = 0;

    void add( const std::string& name, bool ok, const std::string& detail = {} )
    {
        ++checks;
        failures += ok ? 0 : 1;
        std::cout << ( ok ? "PASS " : "FAIL " ) << name << ( detail.empty() ? "" : ": " + detail ) << "\n";
    }
};

void check_trace( const io::Scenario& s, const simkit::TraceRecord& tr, Report& rep, const std::string& label )
{
    const auto& p = s.loop;
    const auto& rows = tr.rows;
    auto first_bad = [ & ]( auto pred ) -> std::string {
        for ( std::size_t i = 0; i < rows.size(); ++i )
            if ( !pred( i ) )
                return "row " + std::to_string( i + 2 ) + " (t=" + std::to_string( rows[ i ].t ) + ")";
        return {};
    };
    constexpr double pi = 3.14159265358979323846;
    std::string bad;
    bad = first_bad( [ & ]( std::size_t i ) { return i == 0 || std::abs( rows[ i ].t - rows[ i - 1 ].t - p.dt ) < 1e-6; } );
    rep.add( label + " time-grid", bad.empty(), bad );
    bad = first_bad( [ & ]( std::size_t i ) { return rows[ i ].s.theta > -pi && rows[ i ].s.theta <= pi; } );
    rep.add( label + " heading-range", bad.empty(), bad );
    bad = first_bad( [ & ]( std::size_t i ) {
        const auto& u = rows[ i ].u;
        return rows[ i ].s.v >= 0 && u.a >= -p.safety.B - 1e-9 && u.a <= p.safety.A + 1e-9 &&
               std::abs( u.alpha ) <= p.dwa.alpha_max + 1e-9;
    } );
    rep.add( label + " control-bounds", bad.empty(), bad );
    bad = first_bad( [ & ]( std::size_t i ) {
        if ( i + 1 == rows.size() )
            return true;
        auto next = simkit::step_dynamics( rows[ i ].s, rows[ i ].u, p.dt );
        const auto& r = rows[ i + 1 ].s;
        return std::abs( next.x - r.x ) < 1e-6 && std::abs( next.y - r.y ) < 1e-6 &&
               std::abs( simkit::wrap_angle( next.theta - r.theta ) ) < 1e-6 && std::abs( next.v - r.v ) < 1e-6 &&
               std::abs( next.omega - r.omega ) < 1e-6;
    } );
    rep.add( label + " dynamics", bad.empty(), bad );
    const double res = simkit::nonholonomic_residual( tr );
    rep.add( label + " nonholonomic", res <= 1e-3, "max residual " + std::to_string( res ) );
    const auto r = radii( s );
    if ( tr.obstacle_names.size() != r.size() )
    {
        rep.add( label + " obstacles", false,
                 "trace has " + std::to_string( tr.obstacle_names.size() ) + " obstacles, scenario " +
                     std::to_string( r.size() ) );
        return;
    }
    const auto hits = simkit::moving_collisions( tr, r, p.safety.D_s );
    rep.add( label + " passive-safety", hits == 0, std::to_string( hits ) + " ticks moving within D_s" );
    bad = first_bad( [ & ]( std::size_t i ) {
        if ( i == 0 )
            return true;
        for ( std::size_t k = 0; k < r.size(); ++k )
            if ( std::hypot( rows[ i ].obstacles[ k ].x - rows[ i - 1 ].obstacles[ k ].x,
                             rows[ i ].obstacles[ k ].y - rows[ i - 1 ].obstacles[ k ].y ) >
                 p.safety.V_obs * p.dt + 1e-6 )
                return false;
        return true;
    } );
    rep.add( label + " obstacle-speed", bad.empty(), bad );
    auto sensed = [ & ]( std::size_t i ) {
        simkit::World w;
        w.robot = rows[ i ].s;
        for ( std::size_t k = 0; k < r.size(); ++k )
            w.obstacles.push_back( { "", simkit::ObstaclePolicy::Static, rows[ i ].obstacles[ k ], r[ k ], 0, {}, {} } );
        return simkit::sensed_point( w, p.sensor_range );
    };
    bool holds_initially = true;
    if ( !rows.empty() )
        if ( auto q = sensed( 0 ) )
            holds_initially = safety::phi_pf( rows[ 0 ].s, *q, p.safety, safety::Norm::Infinity );
    bad = holds_initially ? first_bad( [ & ]( std::size_t i ) {
        auto q = sensed( i );
        return !q || safety::phi_pf( rows[ i ].s, *q, p.safety, safety::Norm::Infinity );
    } )
                          : std::string{};
    rep.add( label + " phi_pf", bad.empty(), holds_initially ? bad : "not required: fails at the first row" );
}

void check_plan( const itmp::Plan& plan, const itmp::PlanRequest& req, Report& rep, const std::string& label )
{
    auto v = itmp::validate_plan( plan, req );
    for ( const auto& c : v.checks )
        rep.add( label + " " + c.name, c.ok, c.detail );
}

int cmd_check( const Options& o )
{
    auto s = load( o );
    Report rep;
    if ( !o.plan.empty() )
    {
        auto j = read_json( o.plan );
        if ( !j.contains( "request" ) || !j.contains( "plan" ) )
            throw InputProblem( o.plan + ": not a plan artifact from `ritmp plan`" );
        auto req = travel_request( s, location( s, j[ "request" ].value( "from", "" ) ),
                                   location( s, j[ "request" ].value( "to", "" ) ) );
        check_plan( io::plan_from_json( j.at( "plan" ) ), req, rep, "plan" );
    }
    const auto graph_path = fs::path( o.out ) / s.name / "graph" / "graph.json";
    if ( o.plan.empty() && o.trace.empty() && fs::exists( graph_path ) )
    {
        auto g = io::graph_from_json( read_json( graph_path ), s );
        for ( const auto& e : g.system_edges )
        {
            const auto& a = g.actions[ e.action ];
            if ( !a.plan )
            {
                rep.add( "edge " + a.name, false, "no plan stored" );
                continue;
            }
            auto v = itmp::validate_plan( *a.plan, edge_request( s, g, e.from, e.to ) );
            std::string why;
            for ( const auto& c : v.checks )
                if ( !c.ok )
                    why += c.name + ": " + c.detail + "; ";
            rep.add( "edge " + a.name, v.ok, why );
        }
    }
    fs::path tp = o.trace.empty() ? fs::path( o.out ) / s.name / "simulate" / "trace.csv" : fs::path( o.trace );
    if ( fs::exists( tp ) && ( o.plan.empty() || !o.trace.empty() ) )
        check_trace( s, read_trace( tp ), rep, "trace" );
    else if ( !o.trace.empty() )
        throw InputProblem( "missing trace " + tp.string() );
    if ( rep.checks == 0 )
        throw InputProblem( "nothing to check; run `ritmp graph` / `ritmp simulate` or pass --plan / --trace" );
    std::cout << rep.checks - rep.failures << "/" << rep.checks << " checks passed\n";
    return rep.failures ? Unrealizable : Ok;
}

} // namespace

int main( int argc, char** argv )
{
    CLI::App app{ "Reactive integrated mission and motion planning" };
    app.require_subcommand( 1 );
    Options o;
    auto common = [ & ]( CLI::App* c ) {
        c->add_option( "--scenario", o.scenario, "scenario JSON" )->required();
        c->add_option( "--out", o.out, "output root (default out)" );
        c->add_option( "--kmax", o.kmax, "horizon bound for ITMP" );
        c->add_option( "--seed", o.seed, "episode seed" )->each( [ & ]( const std::string& ) { o.seed_set = true; } );
        c->add_option( "--jobs", o.jobs, "parallel ITMP jobs for graph" )->check( CLI::PositiveNumber );
        c->add_option( "--timeout", o.timeout, "solver timeout per call, seconds" );
        c->add_flag( "--dot", o.dot, "also write GraphViz output" );
    };
    auto* plan = app.add_subcommand( "plan", "ITMP for one robot move between two locations" );
    common( plan );
    plan->add_option( "--from", o.from, "start location (default: robot home)" );
    plan->add_option( "--to", o.to, "goal location" );
    auto* graph = app.add_subcommand( "graph", "synthesize the mission graph" );
    common( graph );
    auto* strategy = app.add_subcommand( "strategy", "solve the mission game and export the transducer" );
    common( strategy );
    auto* simulate = app.add_subcommand( "simulate", "run the strategy in closed loop" );
    common( simulate );
    auto* render = app.add_subcommand( "render", "SVG of the scenario, trace and tunnel" );
    common( render );
    render->add_option( "--trace", o.trace, "trace CSV (default: simulate output)" );
    render->add_option( "--plan", o.plan, "plan JSON whose tunnel to draw" );
    auto* check = app.add_subcommand( "check", "replay artifacts through the validators" );
    common( check );
    check->add_option( "--trace", o.trace, "trace CSV to check" );
    check->add_option( "--plan", o.plan, "plan JSON from `plan` to check" );

    try
    {
        app.parse( argc, argv );
    }
    catch ( const CLI::ParseError& e )
    {
        const int code = app.exit( e );
        return code == 0 ? Ok : InputError;
    }

    try
    {
        if ( plan->parsed() )
            return cmd_plan( o );
        if ( graph->parsed() )
            return cmd_graph( o );
        if ( strategy->parsed() )
            return cmd_strategy( o );
        if ( simulate->parsed() )
            return cmd_simulate( o );
        if ( render->parsed() )
            return cmd_render( o );
        if ( check->parsed() )
            return cmd_check( o );
    }
    catch ( const io::ScenarioError& e )
    {
        std::cerr << "scenario error: " << e.what() << "\n";
        return InputError;
    }
    catch ( const io::ArtifactError& e )
    {
        std::cerr << "artifact error: " << e.what() << "\n";
        return InputError;
    }
    catch ( const InputProblem& e )
    {
        std::cerr << "error: " << e.what() << "\n";
        return InputError;
    }
    catch ( const encoder::BackendError& e )
    {
        std::cerr << "solver backend error: " << e.what() << "\n";
        return BackendFailure;
    }
    catch ( const encoder::ProtocolError& e )
    {
        std::cerr << "solver protocol error: " << e.what() << "\n";
        return BackendFailure;
    }
    catch ( const json::exception& e )
    {
        std::cerr << "artifact error: " << e.what() << "\n";
        return InputError;
    }
    catch ( const std::invalid_argument& e )
    {
        std::cerr << "input error: " << e.what() << "\n";
        return InputError;
    }
    catch ( const std::exception& e )
    {
        std::cerr << "error: " << e.what() << "\n";
        return BackendFailure;
    }
    return InputError;
}
