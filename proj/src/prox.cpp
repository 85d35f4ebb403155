#include "nashsplit/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nashsplit/kernels.hpp"

namespace nashsplit {

ProxFunction::ProxFunction(Kind kind, SpaceLayout layout)
    : kind_(kind), layout_(std::move(layout)) {}

ProxFunction ProxFunction::zero(SpaceLayout layout) {
  return ProxFunction(Kind::Zero, std::move(layout));
}

ProxFunction ProxFunction::box(SpaceLayout layout, std::vector<double> lo,
                               std::vector<double> hi) {
  ProxFunction f(Kind::Box, std::move(layout));
  const std::size_t n = static_cast<std::size_t>(f.layout_.total_dim());
  if (lo.size() != n || hi.size() != n)
    throw DimensionError("box: bound lengths must match layout dimension");
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(lo[i]) || std::isnan(hi[i]))
      throw ValidationError("box: NaN bound at coordinate " + std::to_string(i));
    if (lo[i] > hi[i])
      throw ValidationError("box: lo > hi at coordinate " + std::to_string(i));
  }
  f.lo_ = std::move(lo);
  f.hi_ = std::move(hi);
  return f;
}

ProxFunction ProxFunction::ball(SpaceLayout layout, std::vector<double> center,
                                double radius) {
  ProxFunction f(Kind::Ball, std::move(layout));
  if (center.size() != static_cast<std::size_t>(f.layout_.total_dim()))
    throw DimensionError("ball: center length must match layout dimension");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw ValidationError("ball: radius must be positive and finite");
  for (double c : center)
    if (!std::isfinite(c)) throw ValidationError("ball: non-finite center");
  f.center_ = std::move(center);
  f.radius_ = radius;
  return f;
}

namespace {
void check_normal(const SpaceLayout& layout, const std::vector<double>& normal,
                  double offset, const char* what) {
  if (normal.size() != static_cast<std::size_t>(layout.total_dim()))
    throw DimensionError(std::string(what) + ": normal length must match layout");
  double n2 = 0.0;
  for (double a : normal) {
    if (!std::isfinite(a)) throw ValidationError(std::string(what) + ": non-finite normal");
    n2 += a * a;
  }
  if (n2 == 0.0) throw ValidationError(std::string(what) + ": zero normal vector");
  if (!std::isfinite(offset))
    throw ValidationError(std::string(what) + ": non-finite offset");
}
}  // namespace

ProxFunction ProxFunction::halfspace(SpaceLayout layout, std::vector<double> normal,
                                     double offset) {
  ProxFunction f(Kind::Halfspace, std::move(layout));
  check_normal(f.layout_, normal, offset, "halfspace");
  f.normal_ = std::move(normal);
  f.offset_ = offset;
  return f;
}

ProxFunction ProxFunction::simplex(SpaceLayout layout) {
  return ProxFunction(Kind::Simplex, std::move(layout));
}

ProxFunction ProxFunction::canonical_simplex(SpaceLayout layout) {
  return ProxFunction(Kind::CanonicalSimplex, std::move(layout));
}

ProxFunction ProxFunction::affine(SpaceLayout layout, std::vector<double> normal,
                                  double offset) {
  ProxFunction f(Kind::Affine, std::move(layout));
  check_normal(f.layout_, normal, offset, "affine");
  f.normal_ = std::move(normal);
  f.offset_ = offset;
  return f;
}

namespace {
void check_parts(const SpaceLayout& layout, const std::vector<ProxFunction>& parts,
                 const char* what) {
  if (static_cast<int>(parts.size()) != layout.blocks())
    throw DimensionError(std::string(what) + ": " + std::to_string(parts.size()) +
                         " parts for " + std::to_string(layout.blocks()) + " blocks");
  for (int i = 0; i < layout.blocks(); ++i) {
    const auto& pl = parts[static_cast<std::size_t>(i)].layout();
    if (pl.total_dim() != layout.dim(i))
      throw DimensionError(std::string(what) + ": part " + std::to_string(i) +
                           " covers dimension " + std::to_string(pl.total_dim()) +
                           ", block has " + std::to_string(layout.dim(i)));
  }
}
}  // namespace

ProxFunction ProxFunction::separable_sum(SpaceLayout layout,
                                         std::vector<ProxFunction> parts) {
  ProxFunction f(Kind::SeparableSum, std::move(layout));
  check_parts(f.layout_, parts, "separable_sum");
  f.parts_ = std::move(parts);
  return f;
}

ProxFunction ProxFunction::product_set(SpaceLayout layout,
                                       std::vector<ProxFunction> parts) {
  ProxFunction f(Kind::ProductSet, std::move(layout));
  check_parts(f.layout_, parts, "product_set");
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (!parts[i].is_indicator())
      throw ValidationError("product_set: part " + std::to_string(i) +
                            " is not a set indicator");
  f.parts_ = std::move(parts);
  return f;
}

bool ProxFunction::is_indicator() const {
  switch (kind_) {
    case Kind::Zero:
      return false;
    case Kind::Box:
    case Kind::Ball:
    case Kind::Halfspace:
    case Kind::Simplex:
    case Kind::CanonicalSimplex:
    case Kind::Affine:
    case Kind::ProductSet:
      return true;
    case Kind::SeparableSum:
      return std::all_of(parts_.begin(), parts_.end(),
                         [](const ProxFunction& p) { return p.is_indicator(); });
  }
  return false;
}

std::vector<double> project_simplex(std::span<const double> v) {
  if (v.empty()) throw ValidationError("project_simplex: empty vector");
  const std::size_t n = v.size();
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  std::size_t support = 0;
  for (std::size_t j = 0; j < n; ++j) {
    cumsum += u[j];
    const double t = (1.0 - cumsum) / static_cast<double>(j + 1);
    if (u[j] + t > 0.0) {
      support = j + 1;
      theta = t;
    }
  }
  (void)support;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(v[i] + theta, 0.0);
  return out;
}

namespace {

void project_canonical_simplex(std::span<const double> x, std::span<double> out) {
  // Projection onto { x >= 0, sum x <= 1 }: clip to the nonnegative orthant;
  // if that lands inside the sum constraint it is the answer, otherwise the
  // sum constraint is active and the problem reduces to the simplex case.
  double clipped_sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) clipped_sum += std::max(x[i], 0.0);
  if (clipped_sum <= 1.0) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::max(x[i], 0.0);
    return;
  }
  const std::vector<double> p = project_simplex(x);
  std::copy(p.begin(), p.end(), out.begin());
}

}  // namespace

void prox_into(const ProxFunction& f, double gamma, std::span<const double> x,
               std::span<double> out) {
  if (!(gamma > 0.0)) throw ValidationError("prox: gamma must be > 0");
  const std::size_t n = static_cast<std::size_t>(f.layout().total_dim());
  if (x.size() != n || out.size() != n)
    throw DimensionError("prox: input length does not match descriptor layout " +
                         f.layout().describe());

  switch (f.kind()) {
    case ProxFunction::Kind::Zero: {
      kernels::copy(x, out);
      return;
    }
    case ProxFunction::Kind::Box: {
      const auto& lo = f.lo();
      const auto& hi = f.hi();
      const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(static) if (count >= static_cast<long long>(kernels::kVectorGrain))
      for (long long i = 0; i < count; ++i)
        out[i] = std::min(std::max(x[i], lo[static_cast<std::size_t>(i)]),
                          hi[static_cast<std::size_t>(i)]);
      return;
    }
    case ProxFunction::Kind::Ball: {
      const auto& c = f.center();
      double d2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - c[i];
        d2 += d * d;
      }
      const double dist = std::sqrt(d2);
      if (dist <= f.radius()) {
        kernels::copy(x, out);
      } else {
        const double s = f.radius() / dist;
        for (std::size_t i = 0; i < n; ++i) out[i] = c[i] + s * (x[i] - c[i]);
      }
      return;
    }
    case ProxFunction::Kind::Halfspace: {
      const auto& a = f.normal();
      double ax = 0.0, a2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        ax += a[i] * x[i];
        a2 += a[i] * a[i];
      }
      const double violation = ax - f.offset();
      if (violation <= 0.0) {
        kernels::copy(x, out);
      } else {
        const double s = violation / a2;
        for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - s * a[i];
      }
      return;
    }
    case ProxFunction::Kind::Affine: {
      const auto& a = f.normal();
      double ax = 0.0, a2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        ax += a[i] * x[i];
        a2 += a[i] * a[i];
      }
      const double s = (ax - f.offset()) / a2;
      for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - s * a[i];
      return;
    }
    case ProxFunction::Kind::Simplex: {
      const std::vector<double> p = project_simplex(x);
      std::copy(p.begin(), p.end(), out.begin());
      return;
    }
    case ProxFunction::Kind::CanonicalSimplex: {
      project_canonical_simplex(x, out);
      return;
    }
    case ProxFunction::Kind::SeparableSum:
    case ProxFunction::Kind::ProductSet: {
      const auto& layout = f.layout();
      for (int b = 0; b < layout.blocks(); ++b) {
        const std::size_t off = static_cast<std::size_t>(layout.offset(b));
        const std::size_t len = static_cast<std::size_t>(layout.dim(b));
        prox_into(f.parts()[static_cast<std::size_t>(b)], gamma,
                  x.subspan(off, len), out.subspan(off, len));
      }
      return;
    }
  }
  throw ValidationError("prox: unknown descriptor kind");
}

BlockVector prox(const ProxFunction& f, double gamma, const BlockVector& x) {
  if (x.layout() != f.layout())
    throw DimensionError("prox: point layout " + x.layout().describe() +
                         " does not match descriptor layout " +
                         f.layout().describe());
  BlockVector out(x.layout());
  prox_into(f, gamma, x.flat(), out.flat());
  return out;
}

double membership_residual(const ProxFunction& f, const BlockVector& x) {
  if (!f.is_indicator())
    throw ValidationError("membership_residual: descriptor is not a set indicator");
  const BlockVector p = prox(f, 1.0, x);
  double d2 = 0.0;
  for (int i = 0; i < x.total_dim(); ++i) {
    const double d = x[i] - p[i];
    d2 += d * d;
  }
  return std::sqrt(d2);
}

}  // namespace nashsplit
