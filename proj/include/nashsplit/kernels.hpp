#pragma once

#include <cstddef>
#include <span>

// Dense vector/matrix kernels used by every module. The primary versions are
// OpenMP-parallel for large operands and fall back to the plain loop below
// the grain size. Reductions use a fixed chunk decomposition with an ordered
// combine, so results are bitwise identical for any thread count.
//
// kernels::serial holds the straight-line reference implementations; tests
// and the benchmark compare the two.

namespace nashsplit::kernels {

inline constexpr std::size_t kVectorGrain = 32768;
inline constexpr std::size_t kDotChunk = 4096;
inline constexpr std::size_t kMatvecGrain = 32768;

double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// z = x + alpha * y
void add_scaled(std::span<const double> x, double alpha,
                std::span<const double> y, std::span<double> z);
/// z = x - y + q
void combine(std::span<const double> x, std::span<const double> y,
             std::span<const double> q, std::span<double> z);
void scale(double alpha, std::span<double> x);
void copy(std::span<const double> src, std::span<double> dst);
void fill(std::span<double> x, double value);

/// out = A x, A dense row-major (rows x cols).
void matvec(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> out);
/// out = A^T x.
void matvec_adjoint(std::size_t rows, std::size_t cols,
                    std::span<const double> a, std::span<const double> x,
                    std::span<double> out);

namespace serial {

double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void add_scaled(std::span<const double> x, double alpha,
                std::span<const double> y, std::span<double> z);
void combine(std::span<const double> x, std::span<const double> y,
             std::span<const double> q, std::span<double> z);
void matvec(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> out);
void matvec_adjoint(std::size_t rows, std::size_t cols,
                    std::span<const double> a, std::span<const double> x,
                    std::span<double> out);

}  // namespace serial

}  // namespace nashsplit::kernels
