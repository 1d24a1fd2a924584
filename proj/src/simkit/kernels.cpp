#include "ritmp/simkit/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <limits>

#if defined( __x86_64__ ) || defined( __i386__ )
#define RITMP_X86 1
#include <immintrin.h>
#endif

namespace ritmp::simkit
{

const char* simd_level_name( SimdLevel l ) { return l == SimdLevel::Avx2 ? "avx2" : "scalar"; }

SimdLevel detected_simd_level()
{
#ifdef RITMP_X86
    if ( __builtin_cpu_supports( "avx2" ) )
        return SimdLevel::Avx2;
#endif
    return SimdLevel::Scalar;
}

SimdLevel active_simd_level()
{
    static const SimdLevel level = [] {
        const char* env = std::getenv( "RITMP_SIMD" );
        if ( env && std::strcmp( env, "scalar" ) == 0 )
            return SimdLevel::Scalar;
        return detected_simd_level();
    }();
    return level;
}

void min_slack_scalar( const double* xs, const double* ys, std::size_t n, const FacetRows& f, double* out )
{
    const std::size_t m = f.size();
    for ( std::size_t i = 0; i < n; ++i )
    {
        double best = std::numeric_limits< double >::infinity();
        for ( std::size_t j = 0; j < m; ++j )
        {
            const double t = f.hx[ j ] * xs[ i ];
            const double u = f.hy[ j ] * ys[ i ];
            const double r = f.c[ j ] - ( t + u );
            best = r < best ? r : best;
        }
        out[ i ] = best;
    }
}

void dist2_scalar( const double* xs, const double* ys, std::size_t n, double px, double py, double* out )
{
    for ( std::size_t i = 0; i < n; ++i )
    {
        const double dx = xs[ i ] - px;
        const double dy = ys[ i ] - py;
        out[ i ] = dx * dx + dy * dy;
    }
}

#ifdef RITMP_X86

// Same operation order as the scalar loops and no fused multiply-add, so results match bit for bit.
__attribute__( ( target( "avx2" ) ) ) void min_slack_avx2( const double* xs, const double* ys, std::size_t n,
                                                           const FacetRows& f, double* out )
{
    const std::size_t m = f.size();
    std::size_t i = 0;
    for ( ; i + 4 <= n; i += 4 )
    {
        const __m256d x = _mm256_loadu_pd( xs + i );
        const __m256d y = _mm256_loadu_pd( ys + i );
        __m256d best = _mm256_set1_pd( std::numeric_limits< double >::infinity() );
        for ( std::size_t j = 0; j < m; ++j )
        {
            const __m256d t = _mm256_mul_pd( _mm256_set1_pd( f.hx[ j ] ), x );
            const __m256d u = _mm256_mul_pd( _mm256_set1_pd( f.hy[ j ] ), y );
            const __m256d r = _mm256_sub_pd( _mm256_set1_pd( f.c[ j ] ), _mm256_add_pd( t, u ) );
            // minpd(a, b) = a < b ? a : b, the scalar select above.
            best = _mm256_min_pd( r, best );
        }
        _mm256_storeu_pd( out + i, best );
    }
    if ( i < n )
        min_slack_scalar( xs + i, ys + i, n - i, f, out + i );
}

__attribute__( ( target( "avx2" ) ) ) void dist2_avx2( const double* xs, const double* ys, std::size_t n, double px,
                                                       double py, double* out )
{
    const __m256d cx = _mm256_set1_pd( px ), cy = _mm256_set1_pd( py );
    std::size_t i = 0;
    for ( ; i + 4 <= n; i += 4 )
    {
        const __m256d dx = _mm256_sub_pd( _mm256_loadu_pd( xs + i ), cx );
        const __m256d dy = _mm256_sub_pd( _mm256_loadu_pd( ys + i ), cy );
        _mm256_storeu_pd( out + i, _mm256_add_pd( _mm256_mul_pd( dx, dx ), _mm256_mul_pd( dy, dy ) ) );
    }
    if ( i < n )
        dist2_scalar( xs + i, ys + i, n - i, px, py, out + i );
}

#else

void min_slack_avx2( const double* xs, const double* ys, std::size_t n, const FacetRows& f, double* out )
{
    min_slack_scalar( xs, ys, n, f, out );
}

void dist2_avx2( const double* xs, const double* ys, std::size_t n, double px, double py, double* out )
{
    dist2_scalar( xs, ys, n, px, py, out );
}

#endif

void min_slack( const double* xs, const double* ys, std::size_t n, const FacetRows& f, double* out )
{
    if ( active_simd_level() == SimdLevel::Avx2 )
        min_slack_avx2( xs, ys, n, f, out );
    else
        min_slack_scalar( xs, ys, n, f, out );
}

void dist2( const double* xs, const double* ys, std::size_t n, double px, double py, double* out )
{
    if ( active_simd_level() == SimdLevel::Avx2 )
        dist2_avx2( xs, ys, n, px, py, out );
    else
        dist2_scalar( xs, ys, n, px, py, out );
}

} // namespace ritmp::simkit
