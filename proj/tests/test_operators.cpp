#include <cmath>
#include <vector>

#include "doctest.h"
#include "nashsplit/operators.hpp"
#include "nashsplit/rng.hpp"

using namespace nashsplit;

namespace {

MonotoneOperator negation_operator(const SpaceLayout& layout) {
  // x -> -x: the designed non-monotone counterexample
  return MonotoneOperator::custom(
      layout,
      [](const BlockVector& x, BlockVector& out) {
        for (int i = 0; i < x.total_dim(); ++i) out[i] = -x[i];
      },
      1.0, false);
}

MonotoneOperator identity_operator(const SpaceLayout& layout) {
  return MonotoneOperator::custom(
      layout,
      [](const BlockVector& x, BlockVector& out) {
        for (int i = 0; i < x.total_dim(); ++i) out[i] = x[i];
      },
      1.0, true);
}

BlockVector random_point(const SpaceLayout& layout, std::uint64_t seed) {
  Rng rng(seed);
  BlockVector v(layout);
  for (int i = 0; i < v.total_dim(); ++i) v[i] = rng.gaussian();
  return v;
}

}  // namespace

TEST_CASE("apply: zero-sum example") {
  const MonotoneOperator b = MonotoneOperator::zero_sum(LinearMap({{1, -1}, {-1, 1}}));
  const auto out = b.apply(BlockVector::from_blocks({{1, 0}, {0, 1}}));
  CHECK(out[0] == doctest::Approx(-1.0));
  CHECK(out[1] == doctest::Approx(1.0));
  CHECK(out[2] == doctest::Approx(-1.0));
  CHECK(out[3] == doctest::Approx(1.0));
}

TEST_CASE("apply: cyclic differences and fixed points") {
  std::vector<LinearMap> maps(2, LinearMap::identity(1));
  const MonotoneOperator b = MonotoneOperator::cyclic(maps);
  CHECK(b.chi() == doctest::Approx(2.0));
  CHECK(b.cocoercive());

  const auto out = b.apply(BlockVector::from_blocks({{0}, {2}}));
  CHECK(out[0] == doctest::Approx(-2.0));
  CHECK(out[1] == doctest::Approx(2.0));

  const auto fixed = b.apply(BlockVector::from_blocks({{1.5}, {1.5}}));
  CHECK(fixed[0] == 0.0);
  CHECK(fixed[1] == 0.0);

  CHECK_THROWS_AS(b.apply(BlockVector::from_blocks({{1, 2}, {3, 4}})),
                  DimensionError);
}

TEST_CASE("cyclic with equal maps vanishes on equal blocks") {
  std::vector<LinearMap> maps(3, LinearMap({{2, 1}, {0, 1}}));
  const MonotoneOperator b = MonotoneOperator::cyclic(maps);
  BlockVector x(SpaceLayout({2, 2, 2}));
  x[0] = x[2] = x[4] = 0.7;
  x[1] = x[3] = x[5] = -1.3;
  const auto out = b.apply(x);
  for (int i = 0; i < 6; ++i) CHECK(out[i] == 0.0);
}

TEST_CASE("zero-sum operator is a pure skew form") {
  const MonotoneOperator b =
      MonotoneOperator::zero_sum(LinearMap({{0.3, -1.2, 0.5}, {2.0, 0.1, -0.7}}));
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto x = random_point(b.layout(), 11 + s);
    const auto bx = b.apply(x);
    CHECK(std::abs(dot(bx, x)) <= 1e-10 * dot(x, x) + 1e-14);
  }
}

TEST_CASE("check_monotone: zero-sum, cyclic, and the planted counterexample") {
  const MonotoneOperator zs = MonotoneOperator::zero_sum(LinearMap({{1, -1}, {-1, 1}}));
  const auto rep_zs = check_monotone(zs, 500, 0);
  CHECK(rep_zs.pass);
  CHECK(std::abs(rep_zs.min_inner) <= 1e-10);

  std::vector<LinearMap> maps(2, LinearMap::identity(2));
  const auto rep_cy = check_monotone(MonotoneOperator::cyclic(maps), 500, 1);
  CHECK(rep_cy.pass);
  CHECK(rep_cy.min_inner >= -1e-12);

  const auto rep_neg = check_monotone(negation_operator(SpaceLayout({2})), 100, 2);
  CHECK_FALSE(rep_neg.pass);
  CHECK(rep_neg.min_inner < -1e-3);
}

TEST_CASE("check_lipschitz: declared constants hold") {
  const MonotoneOperator zs = MonotoneOperator::zero_sum(LinearMap({{0, 1}, {1, 0}}));
  CHECK(zs.chi() == doctest::Approx(1.0));
  const auto rep = check_lipschitz(zs, 500, 3);
  CHECK(rep.pass);
  CHECK(rep.max_ratio <= 1.0 + 1e-9);

  std::vector<LinearMap> maps(2, LinearMap::identity(3));
  const auto rep_cy = check_lipschitz(MonotoneOperator::cyclic(maps), 500, 4);
  CHECK(rep_cy.chi == doctest::Approx(2.0));
  CHECK(rep_cy.pass);
  CHECK(rep_cy.max_ratio <= 2.0 * (1 + 1e-9));

  const MonotoneOperator zero = MonotoneOperator::custom(
      SpaceLayout({2}), [](const BlockVector&, BlockVector& out) { out.set_zero(); },
      0.0, true);
  const auto rep_zero = check_lipschitz(zero, 100, 5, 1.0);
  CHECK(rep_zero.max_ratio == 0.0);
  CHECK(rep_zero.pass);
}

TEST_CASE("check_cocoercive: cyclic constants from the paper bound") {
  std::vector<LinearMap> id3(3, LinearMap::identity(2));
  const auto rep1 = check_cocoercive(MonotoneOperator::cyclic(id3), 1000, 6);
  CHECK(rep1.pass);

  // L_1 = 2 I gives chi = 2 max ||L_i||^2 = 8
  std::vector<LinearMap> scaled;
  LinearMap two = LinearMap::identity(2);
  two.at(0, 0) = two.at(1, 1) = 2.0;
  scaled.push_back(two);
  scaled.push_back(LinearMap::identity(2));
  const MonotoneOperator b = MonotoneOperator::cyclic(scaled);
  CHECK(b.chi() == doctest::Approx(8.0));
  const auto rep2 = check_cocoercive(b, 1000, 7);
  CHECK(rep2.pass);

  // x = y contributes zero slack; the reported minimum stays >= -1e-10
  CHECK(rep2.min_slack >= -1e-10);

  const MonotoneOperator zs = MonotoneOperator::zero_sum(LinearMap({{1, 0}, {0, 1}}));
  CHECK_THROWS_AS(check_cocoercive(zs, 10, 8), ValidationError);
}

TEST_CASE("finite differences: quadratic, bilinear, constant") {
  const SpaceLayout layout({2, 2});
  const auto g_quad = [](const BlockVector& x) {
    const auto b0 = x.block(0);
    return 0.5 * (b0[0] * b0[0] + b0[1] * b0[1]);
  };
  BlockVector x(layout);
  x[0] = 1.0;
  x[1] = 2.0;
  const auto grad = finite_difference_gradient(g_quad, 0, x, 1e-5);
  CHECK(grad[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(grad[1] == doctest::Approx(2.0).epsilon(1e-8));

  const LinearMap l({{1, -2}, {3, 0.5}});
  const MonotoneOperator zs = MonotoneOperator::zero_sum(l);
  const auto g_bilinear = [&l](const BlockVector& v) {
    std::vector<double> ly(2);
    l.apply(v.block(1), ly);
    const auto v1 = v.block(0);
    return v1[0] * ly[0] + v1[1] * ly[1];
  };
  const auto xr = random_point(layout, 99);
  const auto fd = finite_difference_gradient(g_bilinear, 0, xr, 1e-5);
  const auto bx = zs.apply(xr);
  CHECK(fd[0] == doctest::Approx(bx[0]).epsilon(1e-8));
  CHECK(fd[1] == doctest::Approx(bx[1]).epsilon(1e-8));

  const auto g_const = [](const BlockVector&) { return 3.25; };
  const auto zero_grad = finite_difference_gradient(g_const, 1, xr, 1e-5);
  CHECK(zero_grad[0] == 0.0);
  CHECK(zero_grad[1] == 0.0);
}

TEST_CASE("custom operator agrees with its finite-difference oracle") {
  // Common convex potential g(x) = |x|^4 / 4, players share it; the stacked
  // gradient is |x|^2 x.
  const SpaceLayout layout({2, 1});
  const auto b = MonotoneOperator::custom(
      layout,
      [](const BlockVector& x, BlockVector& out) {
        const double n2 = dot(x, x);
        for (int i = 0; i < x.total_dim(); ++i) out[i] = n2 * x[i];
      },
      0.0, false);
  const auto g = [](const BlockVector& x) {
    const double n2 = dot(x, x);
    return 0.25 * n2 * n2;
  };
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto x = random_point(layout, 31000 + s);
    const auto bx = b.apply(x);
    int flat = 0;
    for (int player = 0; player < layout.blocks(); ++player) {
      const auto fd = finite_difference_gradient(g, player, x, 1e-5);
      for (double v : fd) {
        CHECK(v == doctest::Approx(bx[flat]).epsilon(1e-6));
        ++flat;
      }
    }
  }
}

TEST_CASE("1000-pair invariants for the declared constants") {
  const MonotoneOperator zs =
      MonotoneOperator::zero_sum(LinearMap({{0.5, -1.5}, {2.5, 0.25}}));
  CHECK(check_lipschitz(zs, 1000, 12).pass);

  std::vector<LinearMap> maps;
  maps.push_back(LinearMap({{1, 0.5}, {0, 1}}));
  maps.push_back(LinearMap({{2, 0}, {0.25, 1}}));
  maps.push_back(LinearMap::identity(2));
  const MonotoneOperator cy = MonotoneOperator::cyclic(maps);
  CHECK(check_cocoercive(cy, 1000, 13).pass);
  CHECK(check_lipschitz(cy, 1000, 14).pass);
  CHECK(check_monotone(cy, 1000, 15).pass);
}

TEST_CASE("saddle operator: validation and chi") {
  const LinearMap id2 = LinearMap::identity(2);
  const LinearMap m({{1, 0}, {0, 1}});
  const MonotoneOperator b = MonotoneOperator::saddle(id2, m, id2);
  // stacked [[I, I], [-I, I]] has singular values sqrt(2)
  CHECK(b.chi() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
  CHECK_FALSE(b.cocoercive());

  const auto out = b.apply(BlockVector::from_blocks({{1, 0}, {0, 2}}));
  CHECK(out[0] == doctest::Approx(1.0));   // Q1 x1 + M x2
  CHECK(out[1] == doctest::Approx(2.0));
  CHECK(out[2] == doctest::Approx(-1.0));  // Q2 x2 - M^T x1
  CHECK(out[3] == doctest::Approx(2.0));

  CHECK_THROWS_AS(MonotoneOperator::saddle(LinearMap({{0, 1}, {0, 0}}), m, id2),
                  ValidationError);  // asymmetric
  CHECK_THROWS_AS(MonotoneOperator::saddle(LinearMap({{0, 1}, {1, 0}}), m, id2),
                  ValidationError);  // indefinite
}

TEST_CASE("chi override is flagged") {
  const MonotoneOperator zs = MonotoneOperator::zero_sum(LinearMap({{1, 0}, {0, 1}}));
  CHECK(zs.chi_source() == ChiSource::Computed);
  const MonotoneOperator over = zs.with_chi(5.0);
  CHECK(over.chi() == 5.0);
  CHECK(over.chi_source() == ChiSource::Overridden);
  const auto rep = check_lipschitz(over, 100, 16);
  CHECK(rep.chi_source == ChiSource::Overridden);
}
