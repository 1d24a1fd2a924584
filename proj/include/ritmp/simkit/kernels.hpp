#pragma once

#include <cstddef>
#include <vector>

namespace ritmp::simkit
{

/// Half-planes hx*x + hy*y <= c with (hx, hy) of unit length, stored as columns.
struct FacetRows
{
    std::vector< double > hx;
    std::vector< double > hy;
    std::vector< double > c;

    [[nodiscard]] std::size_t size() const { return c.size(); }
};

enum class SimdLevel
{
    Scalar,
    Avx2
};

const char* simd_level_name( SimdLevel l );

/// What the CPU supports.
SimdLevel detected_simd_level();

/// Detected level unless RITMP_SIMD=scalar is set.
SimdLevel active_simd_level();

/// out[i] = min_j ( c_j - ( hx_j * x_i + hy_j * y_i ) ): signed distance to the nearest facet,
/// negative outside. +inf for an empty facet list.
void min_slack_scalar( const double* xs, const double* ys, std::size_t n, const FacetRows& f, double* out );
void min_slack_avx2( const double* xs, const double* ys, std::size_t n, const FacetRows& f, double* out );

/// out[i] = (x_i - px)^2 + (y_i - py)^2.
void dist2_scalar( const double* xs, const double* ys, std::size_t n, double px, double py, double* out );
void dist2_avx2( const double* xs, const double* ys, std::size_t n, double px, double py, double* out );

/// Dispatch on active_simd_level(). The variants are bitwise identical.
void min_slack( const double* xs, const double* ys, std::size_t n, const FacetRows& f, double* out );
void dist2( const double* xs, const double* ys, std::size_t n, double px, double py, double* out );

} // namespace ritmp::simkit
