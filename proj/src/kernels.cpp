#include "nashsplit/kernels.hpp"

#include <cassert>
#include <cmath>
#include <vector>

namespace nashsplit::kernels {

namespace serial {

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double nrm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void add_scaled(std::span<const double> x, double alpha,
                std::span<const double> y, std::span<double> z) {
  assert(x.size() == y.size() && x.size() == z.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + alpha * y[i];
}

void combine(std::span<const double> x, std::span<const double> y,
             std::span<const double> q, std::span<double> z) {
  assert(x.size() == y.size() && x.size() == q.size() && x.size() == z.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i] + q[i];
}

void matvec(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> out) {
  assert(a.size() == rows * cols && x.size() == cols && out.size() == rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a.data() + r * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
    out[r] = s;
  }
}

void matvec_adjoint(std::size_t rows, std::size_t cols,
                    std::span<const double> a, std::span<const double> x,
                    std::span<double> out) {
  assert(a.size() == rows * cols && x.size() == rows && out.size() == cols);
  for (std::size_t c = 0; c < cols; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += a[r * cols + c] * x[r];
    out[c] = s;
  }
}

}  // namespace serial

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  if (n <= kDotChunk) return serial::dot(x, y);
  const std::size_t nchunks = (n + kDotChunk - 1) / kDotChunk;
  std::vector<double> partial(nchunks);
#pragma omp parallel for schedule(static)
  for (long long ci = 0; ci < static_cast<long long>(nchunks); ++ci) {
    const std::size_t c = static_cast<std::size_t>(ci);
    const std::size_t lo = c * kDotChunk;
    const std::size_t hi = std::min(n, lo + kDotChunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
    partial[c] = s;
  }
  // ordered combine keeps the result independent of the thread count
  double s = 0.0;
  for (std::size_t c = 0; c < nchunks; ++c) s += partial[c];
  return s;
}

double nrm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const long long n = static_cast<long long>(x.size());
#pragma omp parallel for schedule(static) if (n >= static_cast<long long>(kVectorGrain))
  for (long long i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void add_scaled(std::span<const double> x, double alpha,
                std::span<const double> y, std::span<double> z) {
  assert(x.size() == y.size() && x.size() == z.size());
  const long long n = static_cast<long long>(x.size());
#pragma omp parallel for schedule(static) if (n >= static_cast<long long>(kVectorGrain))
  for (long long i = 0; i < n; ++i) z[i] = x[i] + alpha * y[i];
}

void combine(std::span<const double> x, std::span<const double> y,
             std::span<const double> q, std::span<double> z) {
  assert(x.size() == y.size() && x.size() == q.size() && x.size() == z.size());
  const long long n = static_cast<long long>(x.size());
#pragma omp parallel for schedule(static) if (n >= static_cast<long long>(kVectorGrain))
  for (long long i = 0; i < n; ++i) z[i] = x[i] - y[i] + q[i];
}

void scale(double alpha, std::span<double> x) {
  const long long n = static_cast<long long>(x.size());
#pragma omp parallel for schedule(static) if (n >= static_cast<long long>(kVectorGrain))
  for (long long i = 0; i < n; ++i) x[i] *= alpha;
}

void copy(std::span<const double> src, std::span<double> dst) {
  assert(src.size() == dst.size());
  const long long n = static_cast<long long>(src.size());
#pragma omp parallel for schedule(static) if (n >= static_cast<long long>(kVectorGrain))
  for (long long i = 0; i < n; ++i) dst[i] = src[i];
}

void fill(std::span<double> x, double value) {
  const long long n = static_cast<long long>(x.size());
#pragma omp parallel for schedule(static) if (n >= static_cast<long long>(kVectorGrain))
  for (long long i = 0; i < n; ++i) x[i] = value;
}

void matvec(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> out) {
  assert(a.size() == rows * cols && x.size() == cols && out.size() == rows);
  const long long r_end = static_cast<long long>(rows);
  const bool par = rows * cols >= kMatvecGrain && rows > 1;
#pragma omp parallel for schedule(static) if (par)
  for (long long r = 0; r < r_end; ++r) {
    const double* row = a.data() + static_cast<std::size_t>(r) * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
    out[r] = s;
  }
}

void matvec_adjoint(std::size_t rows, std::size_t cols,
                    std::span<const double> a, std::span<const double> x,
                    std::span<double> out) {
  assert(a.size() == rows * cols && x.size() == rows && out.size() == cols);
  const long long c_end = static_cast<long long>(cols);
  const bool par = rows * cols >= kMatvecGrain && cols > 1;
#pragma omp parallel for schedule(static) if (par)
  for (long long c = 0; c < c_end; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
      s += a[r * cols + static_cast<std::size_t>(c)] * x[r];
    out[c] = s;
  }
}

}  // namespace nashsplit::kernels
