#include <cmath>

#include "doctest.h"
#include "nashsplit/rng.hpp"
#include "nashsplit/space.hpp"

using namespace nashsplit;

namespace {

BlockVector random_point(const SpaceLayout& layout, std::uint64_t seed) {
  Rng rng(seed);
  BlockVector v(layout);
  for (int i = 0; i < v.total_dim(); ++i) v[i] = rng.gaussian();
  return v;
}

LinearMap random_map(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  LinearMap m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m.at(r, c) = rng.gaussian();
  return m;
}

}  // namespace

TEST_CASE("dot: examples and bilinearity") {
  const auto x = BlockVector::from_blocks({{1, 0}, {0, 1}});
  const auto y = BlockVector::from_blocks({{1, 0}, {0, 1}});
  CHECK(dot(x, y) == doctest::Approx(2.0));

  const auto a = BlockVector::from_blocks({{1, 2}});
  const auto b = BlockVector::from_blocks({{3, -1}});
  CHECK(dot(a, b) == doctest::Approx(1.0));

  BlockVector zero(x.layout());
  CHECK(dot(x, zero) == 0.0);
  CHECK(dot(a, b) == dot(b, a));

  const auto mismatched = BlockVector::from_blocks({{1, 2, 3}});
  CHECK_THROWS_AS(dot(a, mismatched), DimensionError);
}

TEST_CASE("norm: examples") {
  CHECK(norm(BlockVector::from_blocks({{3}, {4}})) == doctest::Approx(5.0));
  CHECK(norm(BlockVector(SpaceLayout({2, 2}))) == 0.0);
  CHECK(norm(BlockVector::from_blocks({{1, 1}, {1, 1}})) == doctest::Approx(2.0));
}

TEST_CASE("axpy: examples") {
  const auto e1 = BlockVector::from_blocks({{1, 0}});
  BlockVector zero(e1.layout());
  const auto r1 = axpy(1.0, e1, zero);
  CHECK(r1[0] == 1.0);
  CHECK(r1[1] == 0.0);

  const auto y0 = BlockVector::from_blocks({{2, 5}});
  const auto r2 = axpy(0.0, e1, y0);
  CHECK(r2[0] == 2.0);
  CHECK(r2[1] == 5.0);

  const auto r3 = axpy(-1.0, y0, y0);
  CHECK(norm(r3) == 0.0);
}

TEST_CASE("Cauchy-Schwarz holds on sampled pairs") {
  const SpaceLayout layout({3, 2, 4});
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto x = random_point(layout, 100 + s);
    const auto y = random_point(layout, 5000 + s);
    CHECK(std::abs(dot(x, y)) <= norm(x) * norm(y) * (1.0 + 1e-12));
  }
}

TEST_CASE("spectral_norm: closed-form cases") {
  CHECK(spectral_norm(LinearMap({{0, 1}, {1, 0}})) == doctest::Approx(1.0));
  CHECK(spectral_norm(LinearMap({{2, 0}, {0, 1}})) == doctest::Approx(2.0));
  // [[1,1],[0,1]]: largest eigenvalue of A^T A is (3+sqrt(5))/2
  const double expected = std::sqrt((3.0 + std::sqrt(5.0)) / 2.0);
  CHECK(spectral_norm(LinearMap({{1, 1}, {0, 1}})) ==
        doctest::Approx(expected).epsilon(1e-8));
  CHECK(spectral_norm(LinearMap(3, 5)) == 0.0);
}

TEST_CASE("spectral_norm survives an all-ones null start") {
  // (1,1) lies in the null space of L^T L here; the fallback start must
  // still find ||L|| = 2.
  const LinearMap l({{1, -1}, {-1, 1}});
  CHECK(spectral_norm(l) == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("adjoint identity <Lx,y> = <x,L^T y>") {
  const LinearMap l = random_map(4, 6, 77);
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(900 + s);
    std::vector<double> x(6), y(4), lx(4), lty(6);
    for (double& v : x) v = rng.gaussian();
    for (double& v : y) v = rng.gaussian();
    l.apply(x, lx);
    l.apply_adjoint(y, lty);
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < 4; ++i) lhs += lx[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    for (int i = 0; i < 6; ++i) rhs += x[static_cast<std::size_t>(i)] * lty[static_cast<std::size_t>(i)];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("spectral_norm dominates Rayleigh ratios and is transpose-invariant") {
  for (std::uint64_t ms = 0; ms < 5; ++ms) {
    const LinearMap l = random_map(5, 3, 31 + ms);
    const double sn = spectral_norm(l);
    CHECK(spectral_norm(l.transposed()) == doctest::Approx(sn).epsilon(1e-8));
    for (std::uint64_t s = 0; s < 100; ++s) {
      Rng rng(1234 + 101 * ms + s);
      std::vector<double> x(3), lx(5);
      for (double& v : x) v = rng.gaussian();
      l.apply(x, lx);
      double nx = 0.0, nlx = 0.0;
      for (double v : x) nx += v * v;
      for (double v : lx) nlx += v * v;
      CHECK(std::sqrt(nlx) <= sn * std::sqrt(nx) * (1.0 + 1e-8));
    }
  }
}

TEST_CASE("LinearMap validation") {
  CHECK_THROWS_AS(LinearMap({{1, 2}, {3}}), DimensionError);
  std::vector<std::vector<double>> bad = {{1.0, std::nan("")}};
  CHECK_THROWS_AS((LinearMap(bad)), ValidationError);
  CHECK_THROWS_AS(SpaceLayout({2, 0}), ValidationError);
}

TEST_CASE("solve_dense solves and flags singularity") {
  const LinearMap a({{2, 1}, {1, 3}});
  const auto x = solve_dense(a, std::vector<double>{5, 10});
  REQUIRE(x.has_value());
  CHECK((*x)[0] == doctest::Approx(1.0));
  CHECK((*x)[1] == doctest::Approx(3.0));

  const LinearMap singular({{1, 2}, {2, 4}});
  CHECK_FALSE(solve_dense(singular, std::vector<double>{1, 2}).has_value());
}
