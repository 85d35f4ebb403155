#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "nashsplit/prox.hpp"
#include "nashsplit/rng.hpp"

using namespace nashsplit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BlockVector random_point(const SpaceLayout& layout, std::uint64_t seed,
                         double scale = 1.0) {
  Rng rng(seed);
  BlockVector v(layout);
  for (int i = 0; i < v.total_dim(); ++i) v[i] = scale * rng.gaussian();
  return v;
}

// Independent simplex-projection oracle: enumerate candidate supports and
// check the KKT conditions of min |x - v|^2 s.t. x >= 0, sum x = sum_target.
// Exponential, so only for small n.
std::vector<double> simplex_projection_kkt(const std::vector<double>& v,
                                           double sum_target = 1.0) {
  const std::size_t n = v.size();
  REQUIRE(n <= 16);
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double sum_s = 0.0;
    int k = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        sum_s += v[i];
        ++k;
      }
    const double tau = (sum_target - sum_s) / k;
    std::vector<double> x(n, 0.0);
    bool feasible = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        x[i] = v[i] + tau;
        if (x[i] < -1e-12) feasible = false;
      } else if (v[i] + tau > 1e-12) {
        feasible = false;  // violated dual condition: coordinate wants in
      }
    }
    if (!feasible) continue;
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) d += (x[i] - v[i]) * (x[i] - v[i]);
    if (d < best_dist) {
      best_dist = d;
      best = x;
    }
  }
  REQUIRE(!best.empty());
  return best;
}

std::vector<ProxFunction> indicator_zoo() {
  std::vector<ProxFunction> zoo;
  const SpaceLayout two = SpaceLayout::single(2);
  const SpaceLayout three = SpaceLayout::single(3);
  zoo.push_back(ProxFunction::box(two, {0, 0}, {1, 1}));
  zoo.push_back(ProxFunction::box(two, {-kInf, 0}, {kInf, kInf}));
  zoo.push_back(ProxFunction::ball(two, {0.5, -0.5}, 2.0));
  zoo.push_back(ProxFunction::halfspace(three, {1, 1, 1}, 1.0));
  zoo.push_back(ProxFunction::affine(three, {1, -2, 1}, 0.5));
  zoo.push_back(ProxFunction::simplex(three));
  zoo.push_back(ProxFunction::canonical_simplex(two));
  {
    std::vector<ProxFunction> parts;
    parts.push_back(ProxFunction::simplex(two));
    parts.push_back(ProxFunction::ball(three, {0, 0, 0}, 1.0));
    zoo.push_back(ProxFunction::product_set(SpaceLayout({2, 3}), std::move(parts)));
  }
  return zoo;
}

}  // namespace

TEST_CASE("prox examples: zero, ball, halfspace") {
  const SpaceLayout two = SpaceLayout::single(2);
  const auto x = BlockVector(two, {2, 3});
  const auto pz = prox(ProxFunction::zero(two), 1.0, x);
  CHECK(pz[0] == 2.0);
  CHECK(pz[1] == 3.0);

  const auto ball = ProxFunction::ball(two, {0, 0}, 1.0);
  const auto pb = prox(ball, 0.7, BlockVector(two, {3, 4}));
  CHECK(pb[0] == doctest::Approx(0.6));
  CHECK(pb[1] == doctest::Approx(0.8));

  const auto hs = ProxFunction::halfspace(two, {1, 1}, 1.0);
  const auto ph = prox(hs, 2.0, BlockVector(two, {1, 1}));
  CHECK(ph[0] == doctest::Approx(0.5));
  CHECK(ph[1] == doctest::Approx(0.5));
}

TEST_CASE("project_simplex: examples and KKT oracle") {
  const auto p1 = project_simplex(std::vector<double>{0.5, 0.5});
  CHECK(p1[0] == doctest::Approx(0.5));
  CHECK(p1[1] == doctest::Approx(0.5));

  const auto p2 = project_simplex(std::vector<double>{2, 0});
  CHECK(p2[0] == doctest::Approx(1.0));
  CHECK(p2[1] == doctest::Approx(0.0));

  const auto p3 = project_simplex(std::vector<double>{0.4, 0.2, 0.1});
  CHECK(p3[0] == doctest::Approx(0.5));
  CHECK(p3[1] == doctest::Approx(0.3));
  CHECK(p3[2] == doctest::Approx(0.2));

  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(40 + s);
    std::vector<double> v(1 + s % 7);
    for (double& e : v) e = 2.0 * rng.gaussian();
    const auto fast = project_simplex(v);
    const auto slow = simplex_projection_kkt(v);
    for (std::size_t i = 0; i < v.size(); ++i)
      CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-10));
  }
  CHECK_THROWS_AS(project_simplex(std::vector<double>{}), ValidationError);
}

TEST_CASE("simplex output is a distribution") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(7000 + s);
    std::vector<double> v(2 + s % 9);
    for (double& e : v) e = 5.0 * rng.gaussian();
    const auto p = project_simplex(v);
    double sum = 0.0;
    for (double e : p) {
      CHECK(e >= -1e-15);
      sum += e;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("canonical simplex projection against KKT enumeration") {
  // { x >= 0, sum x <= 1 }: either the clipped point (interior of the sum
  // constraint) or the simplex projection.
  const SpaceLayout three = SpaceLayout::single(3);
  const auto set = ProxFunction::canonical_simplex(three);
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(99 + s);
    std::vector<double> v(3);
    for (double& e : v) e = 1.5 * rng.gaussian();
    const auto got = prox(set, 1.0, BlockVector(three, v));

    std::vector<double> clipped(3);
    double cs = 0.0;
    for (int i = 0; i < 3; ++i) {
      clipped[static_cast<std::size_t>(i)] = std::max(v[static_cast<std::size_t>(i)], 0.0);
      cs += clipped[static_cast<std::size_t>(i)];
    }
    const auto expected = cs <= 1.0 ? clipped : simplex_projection_kkt(v);
    for (int i = 0; i < 3; ++i)
      CHECK(got[i] == doctest::Approx(expected[static_cast<std::size_t>(i)]).epsilon(1e-10));
  }
}

TEST_CASE("firm nonexpansiveness of every prox variant") {
  auto zoo = indicator_zoo();
  zoo.push_back(ProxFunction::zero(SpaceLayout({2, 2})));
  {
    std::vector<ProxFunction> parts;
    parts.push_back(ProxFunction::zero(SpaceLayout::single(2)));
    parts.push_back(ProxFunction::box(SpaceLayout::single(2), {0, 0}, {1, 1}));
    zoo.push_back(ProxFunction::separable_sum(SpaceLayout({2, 2}), std::move(parts)));
  }
  for (std::size_t zi = 0; zi < zoo.size(); ++zi) {
    const auto& f = zoo[zi];
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto x = random_point(f.layout(), 10 * zi + s, 2.0);
      const auto y = random_point(f.layout(), 9000 + 10 * zi + s, 2.0);
      const auto px = prox(f, 1.0, x);
      const auto py = prox(f, 1.0, y);
      const auto dp = axpy(-1.0, py, px);
      const auto dxy = axpy(-1.0, y, x);
      CHECK(dot(dp, dxy) >= dot(dp, dp) - 1e-10);
    }
  }
}

TEST_CASE("projections are idempotent and gamma-independent") {
  for (const auto& f : indicator_zoo()) {
    for (std::uint64_t s = 0; s < 30; ++s) {
      const auto x = random_point(f.layout(), 333 + s, 3.0);
      const auto p1 = prox(f, 0.1, x);
      const auto p2 = prox(f, 10.0, x);
      const auto pp = prox(f, 1.0, p1);
      for (int i = 0; i < x.total_dim(); ++i) {
        CHECK(p1[i] == doctest::Approx(p2[i]).epsilon(1e-12));
        CHECK(pp[i] == doctest::Approx(p1[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("normal-cone inequality at projections") {
  // <c - Px, x - Px> <= 0 for feasible c (sampled by projecting random
  // points, which covers the set).
  for (const auto& f : indicator_zoo()) {
    const auto x = random_point(f.layout(), 4242, 3.0);
    const auto px = prox(f, 1.0, x);
    const auto gap = axpy(-1.0, px, x);  // x - Px
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto c = prox(f, 1.0, random_point(f.layout(), 5000 + s, 3.0));
      const auto dir = axpy(-1.0, px, c);  // c - Px
      CHECK(dot(dir, gap) <= 1e-10);
    }
  }
}

TEST_CASE("membership_residual: examples and errors") {
  const SpaceLayout two = SpaceLayout::single(2);
  CHECK(membership_residual(ProxFunction::simplex(two),
                            BlockVector(two, {1, 0})) == doctest::Approx(0.0));
  CHECK(membership_residual(ProxFunction::ball(two, {0, 0}, 1.0),
                            BlockVector(two, {2, 0})) == doctest::Approx(1.0));
  CHECK(membership_residual(ProxFunction::box(two, {0, 0}, {1, 1}),
                            BlockVector(two, {2, 2})) ==
        doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(membership_residual(ProxFunction::zero(two),
                                      BlockVector(two, {0, 0})),
                  ValidationError);
}

TEST_CASE("descriptor validation fails fast") {
  const SpaceLayout two = SpaceLayout::single(2);
  CHECK_THROWS_AS(ProxFunction::ball(two, {0, 0}, 0.0), ValidationError);
  CHECK_THROWS_AS(ProxFunction::ball(two, {0, 0}, -1.0), ValidationError);
  CHECK_THROWS_AS(ProxFunction::box(two, {1, 0}, {0, 1}), ValidationError);
  CHECK_THROWS_AS(ProxFunction::halfspace(two, {0, 0}, 1.0), ValidationError);
  CHECK_THROWS_AS(ProxFunction::box(two, {0}, {1, 1}), DimensionError);

  std::vector<ProxFunction> parts;
  parts.push_back(ProxFunction::zero(two));
  CHECK_THROWS_AS(ProxFunction::separable_sum(SpaceLayout({2, 2}), parts),
                  DimensionError);
  std::vector<ProxFunction> nonind;
  nonind.push_back(ProxFunction::zero(two));
  nonind.push_back(ProxFunction::zero(two));
  CHECK_THROWS_AS(ProxFunction::product_set(SpaceLayout({2, 2}), nonind),
                  ValidationError);

  CHECK_THROWS_AS(prox(ProxFunction::zero(two), 0.0, BlockVector(two)),
                  ValidationError);
  CHECK_THROWS_AS(prox(ProxFunction::zero(two), 1.0,
                       BlockVector(SpaceLayout::single(3))),
                  DimensionError);
}
