#include "nashsplit/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "nashsplit/kernels.hpp"

namespace nashsplit {

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::ZeroSumGame: return "zero_sum";
    case ProblemKind::SaddleProblem: return "saddle";
    case ProblemKind::Gne: return "gne";
    case ProblemKind::CyclicProx: return "cyclic_prox";
    case ProblemKind::CyclicProjection: return "cyclic_projection";
    case ProblemKind::Custom: return "custom";
  }
  return "unknown";
}

ProblemSpec build_zero_sum(const LinearMap& l) {
  SpaceLayout layout({l.rows(), l.cols()});
  std::vector<ProxFunction> sets;
  sets.push_back(ProxFunction::simplex(SpaceLayout::single(l.rows())));
  sets.push_back(ProxFunction::simplex(SpaceLayout::single(l.cols())));
  ProblemSpec spec{layout, ProxFunction::product_set(layout, std::move(sets)),
                   MonotoneOperator::zero_sum(l), ProblemKind::ZeroSumGame,
                   {}, {}, {}, {}, {}, {}, {}};
  spec.zero_sum_matrix = l;
  return spec;
}

ProblemSpec build_saddle(const LinearMap& q1, const LinearMap& m,
                         const LinearMap& q2, ProxFunction f) {
  MonotoneOperator b = MonotoneOperator::saddle(q1, m, q2);
  if (f.layout() != b.layout())
    throw DimensionError("build_saddle: f layout " + f.layout().describe() +
                         " does not match (Q1,Q2) layout " +
                         b.layout().describe());
  ProblemSpec spec{b.layout(), std::move(f), std::move(b),
                   ProblemKind::SaddleProblem, {}, {}, {}, {}, {}, {}, {}};
  spec.saddle_q1 = q1;
  spec.saddle_m = m;
  spec.saddle_q2 = q2;
  return spec;
}

namespace {

// Per-player quadratic objectives g_i(x) = 1/2 x_i^T A_ii x_i
// + x_i^T (sum_{j != i} A_ij x_j + c_i), whose partial gradient stack is
// exactly x -> A x + c.
std::vector<std::function<double(const BlockVector&)>> quadratic_objectives(
    const SpaceLayout& layout, std::shared_ptr<const LinearMap> a,
    std::shared_ptr<const std::vector<double>> c) {
  std::vector<std::function<double(const BlockVector&)>> objectives;
  for (int i = 0; i < layout.blocks(); ++i) {
    const int off = layout.offset(i);
    const int dim = layout.dim(i);
    objectives.push_back([a, c, off, dim](const BlockVector& x) {
      const auto flat = x.flat();
      double value = 0.0;
      for (int r = 0; r < dim; ++r) {
        const int row = off + r;
        double own = 0.0;
        double cross = (*c)[static_cast<std::size_t>(row)];
        for (int col = 0; col < a->cols(); ++col) {
          const double entry = a->at(row, col);
          if (col >= off && col < off + dim)
            own += entry * flat[static_cast<std::size_t>(col)];
          else
            cross += entry * flat[static_cast<std::size_t>(col)];
        }
        value += flat[static_cast<std::size_t>(row)] * (0.5 * own + cross);
      }
      return value;
    });
  }
  return objectives;
}

ProblemSpec make_linear_spec(SpaceLayout layout, ProxFunction f, LinearMap a,
                             std::vector<double> offset, bool cocoercive,
                             ProblemKind kind) {
  if (f.layout() != layout)
    throw DimensionError("linear problem: f layout does not match layout");
  if (offset.empty())
    offset.assign(static_cast<std::size_t>(layout.total_dim()), 0.0);
  MonotoneOperator b = MonotoneOperator::linear(layout, a, offset, cocoercive);
  ProblemSpec spec{layout, std::move(f), std::move(b), kind,
                   {}, {}, {}, {}, {}, {}, {}};
  auto a_shared = std::make_shared<const LinearMap>(a);
  auto c_shared = std::make_shared<const std::vector<double>>(offset);
  spec.gradient_matrix = std::move(a);
  spec.gradient_offset = std::move(offset);
  spec.player_objectives = quadratic_objectives(spec.layout, a_shared, c_shared);
  return spec;
}

}  // namespace

ProblemSpec build_gne(ProxFunction c, MonotoneOperator gradients) {
  if (!c.is_indicator())
    throw ValidationError(
        "build_gne: the shared constraint must be a set indicator");
  if (c.layout() != gradients.layout())
    throw DimensionError("build_gne: constraint layout " +
                         c.layout().describe() + " does not match operator " +
                         gradients.layout().describe());
  ProblemSpec spec{c.layout(), std::move(c), std::move(gradients),
                   ProblemKind::Gne, {}, {}, {}, {}, {}, {}, {}};
  if (const LinearMap* a = spec.b.linear_matrix()) {
    auto a_shared = std::make_shared<const LinearMap>(*a);
    auto c_shared =
        std::make_shared<const std::vector<double>>(*spec.b.linear_offset());
    spec.gradient_matrix = *a;
    spec.gradient_offset = *spec.b.linear_offset();
    spec.player_objectives = quadratic_objectives(spec.layout, a_shared, c_shared);
  }
  return spec;
}

ProblemSpec build_gne_linear(SpaceLayout layout, ProxFunction c, LinearMap a,
                             std::vector<double> offset) {
  if (!c.is_indicator())
    throw ValidationError(
        "build_gne: the shared constraint must be a set indicator");
  return make_linear_spec(std::move(layout), std::move(c), std::move(a),
                          std::move(offset), false, ProblemKind::Gne);
}

ProblemSpec build_custom_linear(SpaceLayout layout, ProxFunction f, LinearMap a,
                                std::vector<double> offset, bool cocoercive) {
  return make_linear_spec(std::move(layout), std::move(f), std::move(a),
                          std::move(offset), cocoercive, ProblemKind::Custom);
}

namespace {

ProblemSpec make_cyclic(std::vector<ProxFunction> parts, ProblemKind kind) {
  if (parts.size() < 2)
    throw ValidationError("cyclic: needs at least two players");
  const int dim = parts[0].layout().total_dim();
  std::vector<int> dims;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].layout().total_dim() != dim)
      throw DimensionError("cyclic: part " + std::to_string(i) + " covers " +
                           std::to_string(parts[i].layout().total_dim()) +
                           " dims, expected the shared dimension " +
                           std::to_string(dim));
    dims.push_back(dim);
  }
  SpaceLayout layout(dims);
  std::vector<LinearMap> maps(parts.size(), LinearMap::identity(dim));
  ProblemSpec spec{layout,
                   ProxFunction::separable_sum(layout, std::move(parts)),
                   MonotoneOperator::cyclic(std::move(maps)), kind,
                   {}, {}, {}, {}, {}, {}, {}};
  return spec;
}

}  // namespace

ProblemSpec build_cyclic_prox(std::vector<ProxFunction> parts) {
  return make_cyclic(std::move(parts), ProblemKind::CyclicProx);
}

ProblemSpec build_cyclic_projection(std::vector<ProxFunction> sets) {
  for (std::size_t i = 0; i < sets.size(); ++i)
    if (!sets[i].is_indicator())
      throw ValidationError("build_cyclic_projection: part " +
                            std::to_string(i) + " is not a set indicator");
  return make_cyclic(std::move(sets), ProblemKind::CyclicProjection);
}

namespace {

// Lexicographic enumeration of k-subsets of {0..n-1}.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[static_cast<std::size_t>(i)] < n - k + i) {
      ++idx[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

struct SupportCandidate {
  std::vector<double> x1, x2;
  double value;
};

// Solves the two indifference systems for the given equal-size supports and
// applies the feasibility and no-deviation filters.
std::optional<SupportCandidate> try_supports(const LinearMap& l,
                                             const std::vector<int>& s1,
                                             const std::vector<int>& s2) {
  const int k = static_cast<int>(s1.size());
  const double tol = 1e-9 * (1.0 + l.max_abs());

  // Player 1's mixture x over s1 makes player 2 indifferent across s2:
  // sum_i L_ij x_i = v for j in s2, sum_i x_i = 1.
  LinearMap ax(k + 1, k + 1);
  std::vector<double> bx(static_cast<std::size_t>(k + 1), 0.0);
  for (int row = 0; row < k; ++row) {
    for (int i = 0; i < k; ++i)
      ax.at(row, i) = l.at(s1[static_cast<std::size_t>(i)],
                           s2[static_cast<std::size_t>(row)]);
    ax.at(row, k) = -1.0;  // -v
  }
  for (int i = 0; i < k; ++i) ax.at(k, i) = 1.0;
  bx[static_cast<std::size_t>(k)] = 1.0;
  auto solx = solve_dense(ax, bx);
  if (!solx) return std::nullopt;

  // Player 2's mixture y over s2 makes player 1 indifferent across s1.
  LinearMap ay(k + 1, k + 1);
  std::vector<double> by(static_cast<std::size_t>(k + 1), 0.0);
  for (int row = 0; row < k; ++row) {
    for (int j = 0; j < k; ++j)
      ay.at(row, j) = l.at(s1[static_cast<std::size_t>(row)],
                           s2[static_cast<std::size_t>(j)]);
    ay.at(row, k) = -1.0;  // -w
  }
  for (int j = 0; j < k; ++j) ay.at(k, j) = 1.0;
  by[static_cast<std::size_t>(k)] = 1.0;
  auto soly = solve_dense(ay, by);
  if (!soly) return std::nullopt;

  const double v = (*solx)[static_cast<std::size_t>(k)];
  const double w = (*soly)[static_cast<std::size_t>(k)];
  if (std::abs(v - w) > tol) return std::nullopt;

  std::vector<double> x1(static_cast<std::size_t>(l.rows()), 0.0);
  std::vector<double> x2(static_cast<std::size_t>(l.cols()), 0.0);
  for (int i = 0; i < k; ++i) {
    const double xi = (*solx)[static_cast<std::size_t>(i)];
    if (xi < -tol) return std::nullopt;
    x1[static_cast<std::size_t>(s1[static_cast<std::size_t>(i)])] =
        std::max(xi, 0.0);
  }
  for (int j = 0; j < k; ++j) {
    const double yj = (*soly)[static_cast<std::size_t>(j)];
    if (yj < -tol) return std::nullopt;
    x2[static_cast<std::size_t>(s2[static_cast<std::size_t>(j)])] =
        std::max(yj, 0.0);
  }

  // No profitable pure deviation: player 1 minimizes, player 2 maximizes.
  for (int i = 0; i < l.rows(); ++i) {
    double row_payoff = 0.0;
    for (int j = 0; j < l.cols(); ++j)
      row_payoff += l.at(i, j) * x2[static_cast<std::size_t>(j)];
    if (row_payoff < w - tol) return std::nullopt;
  }
  for (int j = 0; j < l.cols(); ++j) {
    double col_payoff = 0.0;
    for (int i = 0; i < l.rows(); ++i)
      col_payoff += l.at(i, j) * x1[static_cast<std::size_t>(i)];
    if (col_payoff > v + tol) return std::nullopt;
  }

  // Renormalize after clipping.
  const double sx = std::accumulate(x1.begin(), x1.end(), 0.0);
  const double sy = std::accumulate(x2.begin(), x2.end(), 0.0);
  for (double& e : x1) e /= sx;
  for (double& e : x2) e /= sy;

  double value = 0.0;
  for (int i = 0; i < l.rows(); ++i)
    for (int j = 0; j < l.cols(); ++j)
      value += x1[static_cast<std::size_t>(i)] * l.at(i, j) *
               x2[static_cast<std::size_t>(j)];
  return SupportCandidate{std::move(x1), std::move(x2), value};
}

}  // namespace

ZeroSumSolution zero_sum_oracle(const LinearMap& l) {
  if (l.rows() > 6 || l.cols() > 6)
    throw ValidationError(
        "zero_sum_oracle: support enumeration is limited to 6x6 matrices");
  const int kmax = std::min(l.rows(), l.cols());
  for (int k = 1; k <= kmax; ++k) {
    std::vector<int> s1(static_cast<std::size_t>(k));
    std::iota(s1.begin(), s1.end(), 0);
    do {
      std::vector<int> s2(static_cast<std::size_t>(k));
      std::iota(s2.begin(), s2.end(), 0);
      do {
        if (auto cand = try_supports(l, s1, s2))
          return {std::move(cand->x1), std::move(cand->x2), cand->value};
      } while (next_combination(s2, l.cols()));
    } while (next_combination(s1, l.rows()));
  }
  throw std::logic_error(
      "zero_sum_oracle: enumeration exhausted without a valid support pair; "
      "this cannot happen for a finite zero-sum game and indicates a bug");
}

namespace {

EquilibriumCertificate certify(std::vector<double> gaps, double feas,
                               double tolerance, std::string note) {
  EquilibriumCertificate cert;
  cert.player_gaps = std::move(gaps);
  cert.max_gap = cert.player_gaps.empty()
                     ? 0.0
                     : *std::max_element(cert.player_gaps.begin(),
                                         cert.player_gaps.end());
  cert.tolerance = tolerance;
  cert.feasibility_residual = feas;
  cert.note = std::move(note);
  cert.status = (cert.max_gap <= tolerance && feas <= 10.0 * tolerance)
                    ? EquilibriumCertificate::Status::Verified
                    : EquilibriumCertificate::Status::Failed;
  return cert;
}

EquilibriumCertificate unverifiable(std::string note) {
  EquilibriumCertificate cert;
  cert.status = EquilibriumCertificate::Status::Unverifiable;
  cert.note = std::move(note);
  return cert;
}

EquilibriumCertificate verify_zero_sum(const LinearMap& l,
                                       const ProxFunction& f,
                                       const BlockVector& x, double tolerance) {
  const auto x1 = x.block(0);
  const auto x2 = x.block(1);
  std::vector<double> ly(static_cast<std::size_t>(l.rows()));
  std::vector<double> ltx(static_cast<std::size_t>(l.cols()));
  l.apply(x2, ly);
  l.apply_adjoint(x1, ltx);
  double value = 0.0;
  for (std::size_t i = 0; i < ly.size(); ++i) value += x1[i] * ly[i];
  // Both objectives are linear in the deviating player's strategy, so the
  // exact best response over the simplex sits at a vertex.
  const double best1 = *std::min_element(ly.begin(), ly.end());
  const double best2 = *std::max_element(ltx.begin(), ltx.end());
  const double feas = membership_residual(f, x);
  return certify({value - best1, best2 - value}, feas, tolerance,
                 "vertex best-response gaps");
}

EquilibriumCertificate verify_saddle(const ProblemSpec& spec,
                                     const BlockVector& x, double tolerance) {
  const LinearMap& q1 = *spec.saddle_q1;
  const LinearMap& m = *spec.saddle_m;
  const LinearMap& q2 = *spec.saddle_q2;

  if (q1.is_zero() && q2.is_zero() &&
      spec.f.kind() == ProxFunction::Kind::ProductSet &&
      spec.f.parts().size() == 2 &&
      spec.f.parts()[0].kind() == ProxFunction::Kind::Simplex &&
      spec.f.parts()[1].kind() == ProxFunction::Kind::Simplex)
    return verify_zero_sum(m, spec.f, x, tolerance);

  if (spec.f.kind() != ProxFunction::Kind::Zero)
    return unverifiable(
        "saddle verification supports f = 0 or the zero-sum reduction");

  // Unconstrained quadratic best responses: Q1 u = -M x2 and Q2 v = M^T x1.
  const auto x1 = x.block(0);
  const auto x2 = x.block(1);
  std::vector<double> mx2(static_cast<std::size_t>(m.rows()));
  std::vector<double> mtx1(static_cast<std::size_t>(m.cols()));
  m.apply(x2, mx2);
  m.apply_adjoint(x1, mtx1);

  std::vector<double> rhs1(mx2.size());
  for (std::size_t i = 0; i < rhs1.size(); ++i) rhs1[i] = -mx2[i];
  auto u = solve_dense(q1, rhs1);
  auto v = solve_dense(q2, mtx1);
  if (!u || !v)
    return unverifiable("saddle Q blocks are singular; no closed-form responses");

  const auto quad = [](const LinearMap& q, std::span<const double> z) {
    std::vector<double> qz(z.size());
    q.apply(z, qz);
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) s += z[i] * qz[i];
    return 0.5 * s;
  };
  const auto lin = [](std::span<const double> a, std::span<const double> b2) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b2[i];
    return s;
  };
  // Player 1 minimizes 1/2 z Q1 z + z^T (M x2); player 2 minimizes
  // 1/2 z Q2 z - z^T (M^T x1).
  const double obj1_x = quad(q1, x1) + lin(x1, mx2);
  const double obj1_u = quad(q1, *u) + lin(*u, mx2);
  const double obj2_x = quad(q2, x2) - lin(x2, mtx1);
  const double obj2_v = quad(q2, *v) - lin(*v, mtx1);
  return certify({obj1_x - obj1_u, obj2_x - obj2_v}, 0.0, tolerance,
                 "unconstrained quadratic best responses");
}

// Finite per-coordinate bounds enclosing the feasible slice of one player.
// Unbounded directions fall back to a window around the candidate.
void slice_bounds(const ProxFunction& c, const BlockVector& x, int player,
                  std::vector<double>& lo, std::vector<double>& hi) {
  const int off = x.layout().offset(player);
  const int dim = x.layout().dim(player);
  const double window = 1.0 + 2.0 * norm(x);
  lo.assign(static_cast<std::size_t>(dim), 0.0);
  hi.assign(static_cast<std::size_t>(dim), 0.0);
  for (int j = 0; j < dim; ++j) {
    lo[static_cast<std::size_t>(j)] = x[off + j] - window;
    hi[static_cast<std::size_t>(j)] = x[off + j] + window;
  }
  switch (c.kind()) {
    case ProxFunction::Kind::Box:
      for (int j = 0; j < dim; ++j) {
        const std::size_t k = static_cast<std::size_t>(off + j);
        lo[static_cast<std::size_t>(j)] =
            std::max(lo[static_cast<std::size_t>(j)], c.lo()[k]);
        hi[static_cast<std::size_t>(j)] =
            std::min(hi[static_cast<std::size_t>(j)], c.hi()[k]);
      }
      return;
    case ProxFunction::Kind::Ball:
      for (int j = 0; j < dim; ++j) {
        const std::size_t k = static_cast<std::size_t>(off + j);
        lo[static_cast<std::size_t>(j)] = c.center()[k] - c.radius();
        hi[static_cast<std::size_t>(j)] = c.center()[k] + c.radius();
      }
      return;
    case ProxFunction::Kind::Simplex:
    case ProxFunction::Kind::CanonicalSimplex:
      for (int j = 0; j < dim; ++j) {
        lo[static_cast<std::size_t>(j)] = 0.0;
        hi[static_cast<std::size_t>(j)] = 1.0;
      }
      return;
    case ProxFunction::Kind::ProductSet:
    case ProxFunction::Kind::SeparableSum: {
      // Player block corresponds to one part; recurse on it with a
      // single-player view.
      const ProxFunction& part = c.parts()[static_cast<std::size_t>(player)];
      BlockVector sub(SpaceLayout::single(dim));
      for (int j = 0; j < dim; ++j) sub[j] = x[off + j];
      slice_bounds(part, sub, 0, lo, hi);
      return;
    }
    default:
      return;  // halfspace / affine: keep the window
  }
}

EquilibriumCertificate verify_grid(const ProblemSpec& spec, const BlockVector& x,
                                   double tolerance) {
  if (spec.player_objectives.empty())
    return unverifiable(
        "no per-player objectives available for the grid oracle");
  const SpaceLayout& layout = spec.layout;
  constexpr double kStep = 1e-3;
  constexpr double kFeasTol = 1e-9;

  std::vector<double> gaps;
  for (int player = 0; player < layout.blocks(); ++player) {
    const int dim = layout.dim(player);
    if (dim > 3)
      return unverifiable("player " + std::to_string(player) + " has dimension " +
                          std::to_string(dim) +
                          "; grid oracle is unverifiable at desk scale");
    const int off = layout.offset(player);
    const auto& objective = spec.player_objectives[static_cast<std::size_t>(player)];

    std::vector<double> lo, hi;
    slice_bounds(spec.f, x, player, lo, hi);
    std::vector<long long> counts(static_cast<std::size_t>(dim));
    long long total = 1;
    for (int j = 0; j < dim; ++j) {
      const double span = hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)];
      counts[static_cast<std::size_t>(j)] =
          span <= 0.0 ? 1 : static_cast<long long>(std::floor(span / kStep)) + 2;
      total *= counts[static_cast<std::size_t>(j)];
    }

    const double at_x = objective(x);
    double best = at_x;
#pragma omp parallel
    {
      BlockVector cand = x;
      BlockVector proj(layout);
      double local_best = std::numeric_limits<double>::infinity();
#pragma omp for schedule(static) nowait
      for (long long t = 0; t < total; ++t) {
        long long rest = t;
        for (int j = 0; j < dim; ++j) {
          const long long cj = counts[static_cast<std::size_t>(j)];
          const long long idx = rest % cj;
          rest /= cj;
          cand[off + j] = std::min(
              lo[static_cast<std::size_t>(j)] + static_cast<double>(idx) * kStep,
              hi[static_cast<std::size_t>(j)]);
        }
        prox_into(spec.f, 1.0, cand.flat(), proj.flat());
        double d2 = 0.0;
        for (int i = 0; i < layout.total_dim(); ++i) {
          const double d = cand[i] - proj[i];
          d2 += d * d;
        }
        if (d2 > kFeasTol * kFeasTol) continue;
        local_best = std::min(local_best, objective(cand));
      }
#pragma omp critical
      best = std::min(best, local_best);
    }
    gaps.push_back(at_x - best);
  }
  const double feas = membership_residual(spec.f, x);
  return certify(std::move(gaps), feas, tolerance,
                 "dense grid over feasible slices, step 1e-3");
}

EquilibriumCertificate verify_cyclic(const ProblemSpec& spec,
                                     const BlockVector& x, double tolerance) {
  const auto& parts = spec.f.parts();
  const int m = spec.layout.blocks();
  std::vector<double> gaps;
  for (int i = 0; i < m; ++i) {
    const auto xi = x.block(i);
    const auto xnext = x.block((i + 1) % m);
    const std::size_t dim = xi.size();
    std::vector<double> proj(dim);
    prox_into(parts[static_cast<std::size_t>(i)], 1.0, xnext, proj);
    double d2 = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = xi[k] - proj[k];
      d2 += d * d;
    }
    gaps.push_back(std::sqrt(d2));
  }
  return certify(std::move(gaps), 0.0, tolerance,
                 "cyclic fixed-point residuals |x_i - prox_{f_i}(x_{i+1})|");
}

}  // namespace

EquilibriumCertificate verify_equilibrium(const ProblemSpec& spec,
                                          const BlockVector& x,
                                          double tolerance) {
  if (x.layout() != spec.layout)
    throw DimensionError("verify_equilibrium: point layout does not match spec");
  switch (spec.kind) {
    case ProblemKind::ZeroSumGame:
      return verify_zero_sum(*spec.zero_sum_matrix, spec.f, x, tolerance);
    case ProblemKind::SaddleProblem:
      return verify_saddle(spec, x, tolerance);
    case ProblemKind::Gne:
      return verify_grid(spec, x, tolerance);
    case ProblemKind::CyclicProx:
    case ProblemKind::CyclicProjection:
      return verify_cyclic(spec, x, tolerance);
    case ProblemKind::Custom:
      if (!spec.player_objectives.empty() && spec.f.is_indicator())
        return verify_grid(spec, x, tolerance);
      return unverifiable("custom problems have no desk-scale oracle");
  }
  return unverifiable("unknown problem kind");
}

}  // namespace nashsplit
