#include "ritmp/itmp/itmp.hpp"

#include "ritmp/ltlk/eval.hpp"

namespace ritmp::itmp
{

using namespace ritmp::ltlk;
using geometry::Point;

namespace
{

VarId resolve( const VariableUniverse& u, const std::optional< VarId >& given, const char* name )
{
    if ( given )
        return *given;
    auto v = u.find( name );
    if ( !v )
        throw std::invalid_argument( std::string{ "task universe has no pose variable '" } + name + "'" );
    return *v;
}

Point position( const BoundedTrace& t, const PlanFormula& f, std::size_t k )
{
    return { t.value( f.px, k ), t.value( f.py, k ) };
}

} // namespace

PlanFormula plan_formula( const PlanRequest& request )
{
    PlanFormula f;
    f.task = taskspec::build_phi_task( request.task );
    f.px = resolve( request.task.universe, request.px, "px" );
    f.py = resolve( request.task.universe, request.py, "py" );
    f.theta = resolve( request.task.universe, request.theta, "theta" );
    f.phi = conj( { geometry::build_phi_safe( request.workspace, request.cobstacles, f.px, f.py ), f.task.phi } );
    return f;
}

ItmpResult itmp( const PlanRequest& request, const encoder::SolverConfig& solver )
{
    if ( request.K_max < 1 )
        throw std::invalid_argument( "K_max must be at least 1" );
    PlanFormula f = plan_formula( request );
    ItmpResult out;
    for ( std::size_t K = 1; K <= request.K_max; ++K )
    {
        auto cs = encoder::encode( f.phi, K, f.task.universe );
        out.smt_script = encoder::emit_smtlib( cs );
        auto r = encoder::solve( cs, solver );
        out.attempts.push_back( { K, r.status, r.seconds } );
        if ( r.status == encoder::Status::Unknown )
        {
            out.status = encoder::Status::Unknown;
            out.diagnostic = "solver returned unknown at K = " + std::to_string( K ) + "; aborting";
            return out;
        }
        if ( r.status == encoder::Status::Sat )
        {
            out.status = encoder::Status::Sat;
            out.plan = extract_plan( encoder::decode_model( r, f.task.universe, K ), request, f );
            return out;
        }
    }
    out.status = encoder::Status::Unsat;
    out.diagnostic = "no plan up to K_max = " + std::to_string( request.K_max );
    return out;
}

Plan extract_plan( const BoundedTrace& trace, const PlanRequest& request, const PlanFormula& f )
{
    Plan p;
    p.K = trace.K;
    p.trace = trace;
    p.start = { trace.value( f.px, 0 ), trace.value( f.py, 0 ), trace.value( f.theta, 0 ) };
    for ( std::size_t k = 1; k <= trace.K; ++k )
    {
        const Rational& a = trace.value( f.task.action, k - 1 );
        std::size_t idx = is_integer( a ) && a >= 1 ? a.get_num().get_ui() : 0;
        p.T.push_back( idx );
        p.action_names.push_back( idx >= 1 && idx <= request.task.actions.size() ? request.task.actions[ idx - 1 ].name
                                                                                   : "?" );
        p.Y.push_back( { trace.value( f.px, k ), trace.value( f.py, k ), trace.value( f.theta, k ) } );
        try
        {
            p.P.polytopes.push_back( geometry::segment_polytope( request.workspace, request.cobstacles,
                                                                 position( trace, f, k - 1 ), position( trace, f, k ) ) );
        }
        catch ( const std::runtime_error& e )
        {
            throw SelectorInconsistency( "step " + std::to_string( k ) + ": " + e.what() );
        }
    }
    return p;
}

const Check* ValidationReport::find( const std::string& name ) const
{
    for ( const auto& c : checks )
        if ( c.name == name )
            return &c;
    return nullptr;
}

ValidationReport validate_plan( const Plan& plan, const PlanRequest& request )
{
    ValidationReport rep;
    auto add = [ & ]( std::string name, bool ok, std::string detail = {} ) {
        rep.checks.push_back( { std::move( name ), ok, std::move( detail ) } );
        rep.ok = rep.ok && ok;
    };
    PlanFormula f = plan_formula( request );

    bool shape = plan.T.size() == plan.K && plan.Y.size() == plan.K && plan.P.polytopes.size() == plan.K &&
                 plan.trace.K == plan.K && plan.trace.steps.size() == plan.K + 1 &&
                 ( plan.trace.steps.empty() || plan.trace.steps[ 0 ].size() == f.task.universe.size() );
    add( "shape", shape, shape ? "" : "|T|, |Y|, |P| and the trace horizon disagree" );
    if ( !shape )
        return rep;

    add( "oracle", satisfies_prefix( f.phi, plan.trace ) );

    std::string range;
    for ( std::size_t k = 0; k < plan.K && range.empty(); ++k )
        if ( plan.T[ k ] < 1 || plan.T[ k ] > request.task.actions.size() )
            range = "a^[" + std::to_string( k + 1 ) + "] = " + std::to_string( plan.T[ k ] );
    add( "action-range", range.empty(), range );

    std::string agree;
    for ( std::size_t k = 0; k < plan.K && agree.empty(); ++k )
    {
        if ( plan.trace.value( f.task.action, k ) != static_cast< unsigned long >( plan.T[ k ] ) )
            agree = "action " + std::to_string( k + 1 );
        const auto& y = plan.Y[ k ];
        if ( plan.trace.value( f.px, k + 1 ) != y.x || plan.trace.value( f.py, k + 1 ) != y.y ||
             plan.trace.value( f.theta, k + 1 ) != y.theta )
            agree = "target " + std::to_string( k + 1 );
    }
    add( "trace-agreement", agree.empty(), agree );

    auto task = taskspec::check_plan_against_task( plan.trace, request.task, f.task );
    add( "task", task.ok, task.ok ? "" : "step " + std::to_string( task.step ) + ": " + task.reason );

    auto tunnel = geometry::tunnel_valid( plan.P, request.workspace, request.cobstacles );
    add( "tunnel", plan.K == 0 || tunnel.ok, tunnel.violation );

    std::string contain;
    for ( std::size_t k = 0; k < plan.K && contain.empty(); ++k )
    {
        const auto& P = plan.P.polytopes[ k ];
        Point from = k == 0 ? Point{ plan.start.x, plan.start.y } : Point{ plan.Y[ k - 1 ].x, plan.Y[ k - 1 ].y };
        if ( !P.contains( { plan.Y[ k ].x, plan.Y[ k ].y } ) )
            contain = "y^[" + std::to_string( k + 1 ) + "] outside P^[" + std::to_string( k + 1 ) + "]";
        else if ( !P.contains( from ) )
            contain = "y^[" + std::to_string( k ) + "] outside P^[" + std::to_string( k + 1 ) + "]";
    }
    add( "containment", contain.empty(), contain );

    // Def 5 conditions 1-2 on the straight-line polyline through start and targets.
    std::string poly;
    std::vector< Point > pts{ { plan.start.x, plan.start.y } };
    for ( const auto& y : plan.Y )
        pts.push_back( { y.x, y.y } );
    for ( std::size_t k = 0; k < pts.size() && poly.empty(); ++k )
        if ( !request.workspace.boundary.contains( pts[ k ] ) )
            poly = "waypoint " + std::to_string( k ) + " outside the workspace";
    for ( std::size_t k = 0; k + 1 < pts.size() && poly.empty(); ++k )
        for ( std::size_t i = 0; i < request.cobstacles.size() && poly.empty(); ++i )
            if ( geometry::segment_meets_interior( pts[ k ], pts[ k + 1 ], request.cobstacles[ i ].inflated ) )
                poly = "segment " + std::to_string( k + 1 ) + " crosses C-obstacle " + std::to_string( i + 1 );
    add( "polyline", poly.empty(), poly );
    return rep;
}

} // namespace ritmp::itmp
