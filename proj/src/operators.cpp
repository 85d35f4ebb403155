#include "nashsplit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nashsplit/kernels.hpp"
#include "nashsplit/rng.hpp"

namespace nashsplit {

namespace {

void require_symmetric(const LinearMap& q, const char* name) {
  if (q.rows() != q.cols())
    throw ValidationError(std::string(name) + ": must be square");
  const double tol = 1e-12 * (1.0 + q.max_abs());
  for (int r = 0; r < q.rows(); ++r)
    for (int c = r + 1; c < q.cols(); ++c)
      if (std::abs(q.at(r, c) - q.at(c, r)) > tol)
        throw ValidationError(std::string(name) + ": not symmetric at (" +
                              std::to_string(r) + "," + std::to_string(c) + ")");
}

// PSD check by Cholesky of Q + delta I with a tolerance shift.
bool is_psd(const LinearMap& q) {
  const int n = q.rows();
  const double delta = 1e-10 * (1.0 + q.max_abs());
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      m[static_cast<std::size_t>(r) * n + c] = q.at(r, c) + (r == c ? delta : 0.0);
  for (int j = 0; j < n; ++j) {
    double d = m[static_cast<std::size_t>(j) * n + j];
    for (int k = 0; k < j; ++k) {
      const double l = m[static_cast<std::size_t>(j) * n + k];
      d -= l * l;
    }
    if (d <= 0.0) return false;
    const double dj = std::sqrt(d);
    m[static_cast<std::size_t>(j) * n + j] = dj;
    for (int r = j + 1; r < n; ++r) {
      double s = m[static_cast<std::size_t>(r) * n + j];
      for (int k = 0; k < j; ++k)
        s -= m[static_cast<std::size_t>(r) * n + k] *
             m[static_cast<std::size_t>(j) * n + k];
      m[static_cast<std::size_t>(r) * n + j] = s / dj;
    }
  }
  return true;
}

LinearMap stack_saddle(const LinearMap& q1, const LinearMap& m, const LinearMap& q2) {
  const int n1 = q1.rows();
  const int n2 = q2.rows();
  LinearMap s(n1 + n2, n1 + n2);
  for (int r = 0; r < n1; ++r) {
    for (int c = 0; c < n1; ++c) s.at(r, c) = q1.at(r, c);
    for (int c = 0; c < n2; ++c) s.at(r, n1 + c) = m.at(r, c);
  }
  for (int r = 0; r < n2; ++r) {
    for (int c = 0; c < n1; ++c) s.at(n1 + r, c) = -m.at(c, r);
    for (int c = 0; c < n2; ++c) s.at(n1 + r, n1 + c) = q2.at(r, c);
  }
  return s;
}

}  // namespace

MonotoneOperator::MonotoneOperator(Kind kind, SpaceLayout layout)
    : kind_(kind), layout_(std::move(layout)) {}

MonotoneOperator MonotoneOperator::zero_sum(LinearMap l) {
  SpaceLayout layout({l.rows(), l.cols()});
  MonotoneOperator b(Kind::ZeroSum, std::move(layout));
  b.chi_ = spectral_norm(l);
  b.cocoercive_ = false;
  b.maps_.push_back(std::move(l));
  return b;
}

MonotoneOperator MonotoneOperator::saddle(LinearMap q1, LinearMap m, LinearMap q2) {
  require_symmetric(q1, "saddle Q1");
  require_symmetric(q2, "saddle Q2");
  if (!is_psd(q1)) throw ValidationError("saddle Q1: not positive semidefinite");
  if (!is_psd(q2)) throw ValidationError("saddle Q2: not positive semidefinite");
  if (m.rows() != q1.rows() || m.cols() != q2.rows())
    throw DimensionError("saddle: M must be Q1-rows x Q2-rows");
  SpaceLayout layout({q1.rows(), q2.rows()});
  MonotoneOperator b(Kind::Saddle, std::move(layout));
  b.chi_ = spectral_norm(stack_saddle(q1, m, q2));
  b.cocoercive_ = false;
  b.maps_.push_back(std::move(q1));
  b.maps_.push_back(std::move(m));
  b.maps_.push_back(std::move(q2));
  return b;
}

MonotoneOperator MonotoneOperator::cyclic(std::vector<LinearMap> maps) {
  if (maps.size() < 2)
    throw ValidationError("cyclic: needs at least two players");
  const int codomain = maps[0].rows();
  std::vector<int> dims;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (maps[i].rows() != codomain)
      throw DimensionError("cyclic: map " + std::to_string(i) +
                           " has codomain dim " + std::to_string(maps[i].rows()) +
                           ", expected " + std::to_string(codomain));
    dims.push_back(maps[i].cols());
  }
  MonotoneOperator b(Kind::Cyclic, SpaceLayout(std::move(dims)));
  double max_sq = 0.0;
  bool all_id = true;
  for (const auto& m : maps) {
    const double s = spectral_norm(m);
    max_sq = std::max(max_sq, s * s);
    all_id = all_id && m.is_identity();
  }
  b.chi_ = 2.0 * max_sq;
  b.cocoercive_ = true;
  b.identity_maps_ = all_id;
  b.maps_ = std::move(maps);
  return b;
}

MonotoneOperator MonotoneOperator::custom(SpaceLayout layout, GradientFn grad,
                                          double chi, bool cocoercive) {
  if (!grad) throw ValidationError("custom: gradient callback required");
  if (!(chi >= 0.0) || !std::isfinite(chi))
    throw ValidationError("custom: chi must be finite and >= 0");
  MonotoneOperator b(Kind::Custom, std::move(layout));
  b.grad_ = std::move(grad);
  b.chi_ = chi;
  b.cocoercive_ = cocoercive;
  b.chi_source_ = ChiSource::Declared;
  return b;
}

MonotoneOperator MonotoneOperator::linear(SpaceLayout layout, LinearMap a,
                                          std::vector<double> offset,
                                          bool cocoercive) {
  if (a.rows() != layout.total_dim() || a.cols() != layout.total_dim())
    throw DimensionError("linear: matrix must be total_dim x total_dim");
  if (offset.empty()) offset.assign(static_cast<std::size_t>(layout.total_dim()), 0.0);
  if (offset.size() != static_cast<std::size_t>(layout.total_dim()))
    throw DimensionError("linear: offset length must match total_dim");
  for (double v : offset)
    if (!std::isfinite(v)) throw ValidationError("linear: non-finite offset");
  if (cocoercive) {
    // B = A x + c is (1/||A||)-cocoercive iff the skew part vanishes and A is PSD.
    require_symmetric(a, "linear A (cocoercive)");
    if (!is_psd(a))
      throw ValidationError("linear: cocoercive declared but A is not PSD");
  }
  MonotoneOperator b(Kind::Custom, std::move(layout));
  b.chi_ = spectral_norm(a);
  b.cocoercive_ = cocoercive;
  b.maps_.push_back(std::move(a));
  b.offset_ = std::move(offset);
  return b;
}

MonotoneOperator MonotoneOperator::with_chi(double chi) const {
  if (!(chi >= 0.0) || !std::isfinite(chi))
    throw ValidationError("with_chi: chi must be finite and >= 0");
  MonotoneOperator b = *this;
  b.chi_ = chi;
  b.chi_source_ = ChiSource::Overridden;
  return b;
}

void MonotoneOperator::apply_into(const BlockVector& x, BlockVector& out) const {
  if (x.layout() != layout_ || out.layout() != layout_)
    throw DimensionError("MonotoneOperator::apply: layout mismatch, operator is " +
                         layout_.describe());
  switch (kind_) {
    case Kind::ZeroSum: {
      const LinearMap& l = maps_[0];
      l.apply(x.block(1), out.block(0));
      std::vector<double> tmp(static_cast<std::size_t>(l.cols()));
      l.apply_adjoint(x.block(0), tmp);
      auto o1 = out.block(1);
      for (std::size_t i = 0; i < tmp.size(); ++i) o1[i] = 0.0 - tmp[i];
      return;
    }
    case Kind::Saddle: {
      const LinearMap& q1 = maps_[0];
      const LinearMap& m = maps_[1];
      const LinearMap& q2 = maps_[2];
      std::vector<double> tmp(static_cast<std::size_t>(
          std::max(m.rows(), m.cols())));
      // block 1: Q1 x1 + M x2
      m.apply(x.block(1), out.block(0));
      {
        std::span<double> t(tmp.data(), static_cast<std::size_t>(q1.rows()));
        q1.apply(x.block(0), t);
        auto o0 = out.block(0);
        for (std::size_t i = 0; i < t.size(); ++i) o0[i] = t[i] + o0[i];
      }
      // block 2: Q2 x2 - M^T x1
      q2.apply(x.block(1), out.block(1));
      {
        std::span<double> t(tmp.data(), static_cast<std::size_t>(m.cols()));
        m.apply_adjoint(x.block(0), t);
        auto o1 = out.block(1);
        for (std::size_t i = 0; i < t.size(); ++i) o1[i] = o1[i] - t[i];
      }
      return;
    }
    case Kind::Cyclic: {
      const int mplayers = layout_.blocks();
      const std::size_t g = static_cast<std::size_t>(maps_[0].rows());
      // u_i = L_i x_i
      std::vector<std::vector<double>> u(static_cast<std::size_t>(mplayers));
      for (int i = 0; i < mplayers; ++i) {
        if (identity_maps_) {
          const auto b = x.block(i);
          u[static_cast<std::size_t>(i)].assign(b.begin(), b.end());
        } else {
          u[static_cast<std::size_t>(i)].resize(g);
          maps_[static_cast<std::size_t>(i)].apply(x.block(i),
                                                    u[static_cast<std::size_t>(i)]);
        }
      }
      std::vector<double> diff(g);
      for (int i = 0; i < mplayers; ++i) {
        const auto& ui = u[static_cast<std::size_t>(i)];
        const auto& un = u[static_cast<std::size_t>((i + 1) % mplayers)];
        for (std::size_t k = 0; k < g; ++k) diff[k] = ui[k] - un[k];
        if (identity_maps_) {
          auto o = out.block(i);
          std::copy(diff.begin(), diff.end(), o.begin());
        } else {
          maps_[static_cast<std::size_t>(i)].apply_adjoint(diff, out.block(i));
        }
      }
      return;
    }
    case Kind::Custom: {
      if (grad_) {
        grad_(x, out);
        return;
      }
      // linear kind: A x + c
      const LinearMap& a = maps_[0];
      a.apply(x.flat(), out.flat());
      if (!offset_.empty()) kernels::axpy(1.0, offset_, out.flat());
      return;
    }
  }
  throw ValidationError("MonotoneOperator: unknown kind");
}

BlockVector MonotoneOperator::apply(const BlockVector& x) const {
  BlockVector out(layout_);
  apply_into(x, out);
  return out;
}

const LinearMap* MonotoneOperator::zero_sum_matrix() const {
  return kind_ == Kind::ZeroSum ? &maps_[0] : nullptr;
}
const LinearMap* MonotoneOperator::saddle_q1() const {
  return kind_ == Kind::Saddle ? &maps_[0] : nullptr;
}
const LinearMap* MonotoneOperator::saddle_m() const {
  return kind_ == Kind::Saddle ? &maps_[1] : nullptr;
}
const LinearMap* MonotoneOperator::saddle_q2() const {
  return kind_ == Kind::Saddle ? &maps_[2] : nullptr;
}
const std::vector<LinearMap>* MonotoneOperator::cyclic_maps() const {
  return kind_ == Kind::Cyclic ? &maps_ : nullptr;
}
const LinearMap* MonotoneOperator::linear_matrix() const {
  return (kind_ == Kind::Custom && !maps_.empty()) ? &maps_[0] : nullptr;
}
const std::vector<double>* MonotoneOperator::linear_offset() const {
  return (kind_ == Kind::Custom && !maps_.empty()) ? &offset_ : nullptr;
}

namespace {

void fill_gaussian(Rng& rng, BlockVector& v) {
  auto f = v.flat();
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.gaussian();
}

}  // namespace

MonotonicityReport check_monotone(const MonotoneOperator& b, int samples,
                                  std::uint64_t seed) {
  if (samples < 1) throw ValidationError("check_monotone: samples must be >= 1");
  Rng rng(Rng::mix(seed, 0xA0A0A0A0ULL));
  BlockVector x(b.layout()), y(b.layout()), bx(b.layout()), by(b.layout()),
      dx(b.layout()), db(b.layout());
  MonotonicityReport rep;
  rep.samples = samples;
  rep.min_inner = std::numeric_limits<double>::infinity();
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    fill_gaussian(rng, x);
    fill_gaussian(rng, y);
    b.apply_into(x, bx);
    b.apply_into(y, by);
    add_scaled(x, -1.0, y, dx);
    add_scaled(bx, -1.0, by, db);
    const double inner = dot(db, dx);
    const double allowance = 1e-10 * (1.0 + dot(dx, dx));
    rep.min_inner = std::min(rep.min_inner, inner);
    rep.worst_margin = std::min(rep.worst_margin, inner + allowance);
  }
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

LipschitzReport check_lipschitz(const MonotoneOperator& b, int samples,
                                std::uint64_t seed, std::optional<double> chi) {
  if (samples < 1) throw ValidationError("check_lipschitz: samples must be >= 1");
  Rng rng(Rng::mix(seed, 0xB1B1B1B1ULL));
  BlockVector x(b.layout()), y(b.layout()), bx(b.layout()), by(b.layout()),
      dx(b.layout()), db(b.layout());
  LipschitzReport rep;
  rep.samples = samples;
  rep.chi = chi.value_or(b.chi());
  rep.chi_source = chi.has_value() ? ChiSource::Overridden : b.chi_source();
  for (int s = 0; s < samples; ++s) {
    fill_gaussian(rng, x);
    fill_gaussian(rng, y);
    b.apply_into(x, bx);
    b.apply_into(y, by);
    add_scaled(x, -1.0, y, dx);
    add_scaled(bx, -1.0, by, db);
    const double nd = norm(dx);
    if (nd == 0.0) continue;
    rep.max_ratio = std::max(rep.max_ratio, norm(db) / nd);
  }
  rep.pass = rep.chi > 0.0 ? rep.max_ratio <= rep.chi * (1.0 + 1e-9)
                           : rep.max_ratio == 0.0;
  return rep;
}

CocoercivityReport check_cocoercive(const MonotoneOperator& b, int samples,
                                    std::uint64_t seed) {
  if (!b.cocoercive())
    throw ValidationError("check_cocoercive: operator does not declare cocoercivity");
  if (samples < 1) throw ValidationError("check_cocoercive: samples must be >= 1");
  if (!(b.chi() > 0.0))
    throw ValidationError("check_cocoercive: chi must be positive");
  Rng rng(Rng::mix(seed, 0xC2C2C2C2ULL));
  BlockVector x(b.layout()), y(b.layout()), bx(b.layout()), by(b.layout()),
      dx(b.layout()), db(b.layout());
  CocoercivityReport rep;
  rep.samples = samples;
  rep.chi = b.chi();
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    fill_gaussian(rng, x);
    fill_gaussian(rng, y);
    b.apply_into(x, bx);
    b.apply_into(y, by);
    add_scaled(x, -1.0, y, dx);
    add_scaled(bx, -1.0, by, db);
    const double slack = dot(db, dx) - dot(db, db) / rep.chi;
    rep.min_slack = std::min(rep.min_slack, slack);
  }
  rep.pass = rep.min_slack >= -1e-10;
  return rep;
}

std::vector<double> finite_difference_gradient(
    const std::function<double(const BlockVector&)>& g, int player,
    const BlockVector& x, double h) {
  if (!(h > 0.0)) throw ValidationError("finite_difference_gradient: h must be > 0");
  if (player < 0 || player >= x.layout().blocks())
    throw DimensionError("finite_difference_gradient: player index out of range");
  const int off = x.layout().offset(player);
  const int dim = x.layout().dim(player);
  std::vector<double> grad(static_cast<std::size_t>(dim));
  BlockVector probe = x;
  for (int j = 0; j < dim; ++j) {
    const double saved = probe[off + j];
    probe[off + j] = saved + h;
    const double fp = g(probe);
    probe[off + j] = saved - h;
    const double fm = g(probe);
    probe[off + j] = saved;
    grad[static_cast<std::size_t>(j)] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

}  // namespace nashsplit
