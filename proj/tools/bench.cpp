// Benchmark comparing the OpenMP kernels against their serial reference, plus
// one large forward-backward solve to show the end-to-end effect.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nashsplit/games.hpp"
#include "nashsplit/kernels.hpp"
#include "nashsplit/rng.hpp"
#include "nashsplit/solver.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

volatile double g_sink = 0.0;

void bench_vector_ops(std::size_t n) {
  nashsplit::Rng rng(7);
  std::vector<double> x(n), y(n), z(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.gaussian();
    y[i] = rng.gaussian();
  }

  const double t_dot_serial =
      time_best_of(5, [&] { g_sink = nashsplit::kernels::serial::dot(x, y); });
  const double t_dot_par =
      time_best_of(5, [&] { g_sink = nashsplit::kernels::dot(x, y); });
  const double t_axpy_serial = time_best_of(
      5, [&] { nashsplit::kernels::serial::add_scaled(x, 0.5, y, z); });
  const double t_axpy_par =
      time_best_of(5, [&] { nashsplit::kernels::add_scaled(x, 0.5, y, z); });

  std::printf("%-22s n=%-9zu serial %.3e s   parallel %.3e s   speedup %.2fx\n",
              "dot", n, t_dot_serial, t_dot_par, t_dot_serial / t_dot_par);
  std::printf("%-22s n=%-9zu serial %.3e s   parallel %.3e s   speedup %.2fx\n",
              "add_scaled", n, t_axpy_serial, t_axpy_par,
              t_axpy_serial / t_axpy_par);
}

void bench_matvec(std::size_t rows, std::size_t cols) {
  nashsplit::Rng rng(11);
  std::vector<double> a(rows * cols), x(cols), out(rows);
  for (double& v : a) v = rng.gaussian();
  for (double& v : x) v = rng.gaussian();

  const double t_serial = time_best_of(
      5, [&] { nashsplit::kernels::serial::matvec(rows, cols, a, x, out); });
  const double t_par =
      time_best_of(5, [&] { nashsplit::kernels::matvec(rows, cols, a, x, out); });
  std::printf("%-22s %zux%-6zu serial %.3e s   parallel %.3e s   speedup %.2fx\n",
              "matvec", rows, cols, t_serial, t_par, t_serial / t_par);
}

// Cyclic projection between two large balls: the per-iteration work
// (elementwise operator, ball projections, residual norms) runs through the
// parallel kernels.
void bench_cyclic_solve(int dim) {
  using namespace nashsplit;
  std::vector<double> c1(static_cast<std::size_t>(dim), 0.0);
  std::vector<double> c2(static_cast<std::size_t>(dim), 0.0);
  c2[0] = 3.0;
  std::vector<ProxFunction> sets;
  sets.push_back(ProxFunction::ball(SpaceLayout::single(dim), c1, 1.0));
  sets.push_back(ProxFunction::ball(SpaceLayout::single(dim), c2, 1.0));
  ProblemSpec spec = build_cyclic_projection(std::move(sets));

  BlockVector x0(spec.layout);
  Rng rng(3);
  for (int i = 0; i < x0.total_dim(); ++i) x0[i] = rng.gaussian();

  SolverConfig cfg;
  cfg.method = Method::Fb;
  cfg.tol = 1e-10;
  cfg.max_iters = 2000;
  cfg.trace_every = 1000;

  const auto t0 = Clock::now();
  const SolveReport report = solve_fb(spec.f, spec.b, x0, cfg);
  const double elapsed = seconds_since(t0);
  std::printf("%-22s dim=%-7d iters=%-5ld residual=%.2e   %.3e s\n",
              "cyclic projection fb", dim, report.iterations,
              report.final_residual, elapsed);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n\n", omp_get_max_threads());
#else
  std::printf("OpenMP not available; parallel kernels run their serial path\n\n");
#endif

  bench_vector_ops(1u << 16);
  bench_vector_ops(1u << 20);
  bench_vector_ops(1u << 23);
  std::printf("\n");
  bench_matvec(512, 512);
  bench_matvec(2048, 2048);
  std::printf("\n");
  bench_cyclic_solve(1 << 20);
  return 0;
}
