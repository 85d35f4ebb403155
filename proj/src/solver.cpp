#include "nashsplit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "nashsplit/rng.hpp"

namespace nashsplit {

namespace {

// Admissible step ceiling when chi = 0 (B contributes nothing; the iteration
// degenerates to a pure proximal step and any positive gamma works).
constexpr double kGammaMaxChiZero = 1e6;

double distance(const BlockVector& a, const BlockVector& b) {
  double d2 = 0.0;
  const auto fa = a.flat();
  const auto fb = b.flat();
  for (std::size_t i = 0; i < fa.size(); ++i) {
    const double d = fa[i] - fb[i];
    d2 += d * d;
  }
  return std::sqrt(d2);
}

double derive_epsilon(Method method, double chi, double min_gamma) {
  if (chi <= 0.0) return std::min(0.05, min_gamma);
  if (method == Method::Fbf)
    return std::min({0.05, 0.5 / (chi + 1.0), min_gamma});
  return std::min({0.1, 1.0 / (chi + 1.0), min_gamma});
}

double gamma_upper_bound(Method method, double chi, double eps) {
  if (chi <= 0.0) return kGammaMaxChiZero;
  return (method == Method::Fbf ? 1.0 - eps : 2.0 - eps) / chi;
}

double epsilon_upper_bound(Method method, double chi) {
  return (method == Method::Fbf ? 1.0 : 2.0) / (chi + 1.0);
}

double schedule_gamma(const GammaSchedule& s, const StepDefaults& d, long n) {
  switch (s.kind) {
    case GammaSchedule::Kind::Auto:
      return d.gamma;
    case GammaSchedule::Kind::Constant:
      return s.constant;
    case GammaSchedule::Kind::Sequence: {
      const std::size_t i = std::min(static_cast<std::size_t>(n),
                                     s.values.size() - 1);
      return s.values[i];
    }
  }
  return d.gamma;
}

struct ResolvedSteps {
  double epsilon;
  StepDefaults defaults;
};

ResolvedSteps validate_steps(Method method, double chi, const SolverConfig& cfg) {
  const StepDefaults defaults = default_gamma(chi, method);

  double min_gamma = defaults.gamma;
  double max_gamma = defaults.gamma;
  if (cfg.gamma.kind == GammaSchedule::Kind::Constant) {
    min_gamma = max_gamma = cfg.gamma.constant;
  } else if (cfg.gamma.kind == GammaSchedule::Kind::Sequence) {
    if (cfg.gamma.values.empty())
      throw ConfigError("step guard: empty gamma sequence");
    min_gamma = *std::min_element(cfg.gamma.values.begin(), cfg.gamma.values.end());
    max_gamma = *std::max_element(cfg.gamma.values.begin(), cfg.gamma.values.end());
  }

  const double eps = cfg.epsilon > 0.0
                         ? cfg.epsilon
                         : derive_epsilon(method, chi, min_gamma);
  const double eps_hi = epsilon_upper_bound(method, chi);
  if (!(eps > 0.0) || !(eps < eps_hi))
    throw ConfigError("step guard: epsilon " + std::to_string(eps) +
                      " outside ]0, " + std::to_string(eps_hi) + "[ for chi = " +
                      std::to_string(chi));
  const double hi = gamma_upper_bound(method, chi, eps);
  const double hi_slack = hi * (1.0 + 1e-12);
  if (min_gamma < eps || max_gamma > hi_slack)
    throw ConfigError(
        "step guard: gamma must lie in [" + std::to_string(eps) + ", " +
        std::to_string(hi) + "] for chi = " + std::to_string(chi) +
        (method == Method::Fbf ? " (forward-backward-forward)"
                               : " (forward-backward)"));
  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be > 0");
  if (cfg.max_iters < 0) throw ConfigError("max_iters must be >= 0");
  if (cfg.trace_every < 1) throw ConfigError("trace_every must be >= 1");
  return {eps, defaults};
}

void record_point(SolveReport& report, const SolverConfig& cfg, Method method,
                  long n, double r, double gamma, const BlockVector& x,
                  const BlockVector* prox_point) {
  TracePoint tp;
  tp.iter = n;
  tp.residual = r;
  tp.gamma = gamma;
  tp.block_norms.reserve(static_cast<std::size_t>(x.layout().blocks()));
  for (int b = 0; b < x.layout().blocks(); ++b) {
    double s = 0.0;
    for (double v : x.block(b)) s += v * v;
    tp.block_norms.push_back(std::sqrt(s));
  }
  if (cfg.capture_iterates) {
    tp.x = x;
    if (method == Method::Fbf && prox_point != nullptr) tp.p = *prox_point;
  }
  if (cfg.trace_sink) cfg.trace_sink(tp);
  report.trace.push_back(std::move(tp));
}

SolveReport run_splitting(Method method, const ProxFunction& f,
                          const MonotoneOperator& b, const BlockVector& x0,
                          const SolverConfig& cfg) {
  if (x0.layout() != b.layout())
    throw DimensionError("solve: start point layout " + x0.layout().describe() +
                         " does not match operator layout " +
                         b.layout().describe());
  if (f.layout() != b.layout())
    throw DimensionError("solve: prox layout " + f.layout().describe() +
                         " does not match operator layout " +
                         b.layout().describe());
  if (method == Method::Fb && !b.cocoercive())
    throw ConfigError(
        "forward-backward requires a cocoercive operator; this one does not "
        "declare cocoercivity");

  const double chi = b.chi();
  const auto [eps, defaults] = validate_steps(method, chi, cfg);

  SolveReport report;
  report.epsilon = eps;
  report.chi = chi;

  const SpaceLayout& layout = b.layout();
  BlockVector x = x0;
  BlockVector bx(layout), w(layout), prox_w(layout), y(layout), p(layout),
      bp(layout), q(layout), err(layout), xn(layout);

  const bool use_a = !cfg.errors_a.is_zero();
  const bool use_b = !cfg.errors_b.is_zero();
  const bool use_c = !cfg.errors_c.is_zero();

  SolveStatus status = SolveStatus::MaxIters;
  double r = std::numeric_limits<double>::infinity();
  double gamma = defaults.gamma;
  long n = 0;

  for (n = 0;; ++n) {
    gamma = schedule_gamma(cfg.gamma, defaults, n);

    bool finite = x.all_finite();
    if (finite) {
      b.apply_into(x, bx);
      add_scaled(x, -gamma, bx, w);  // w = x - gamma B x
      finite = w.all_finite();
    }
    if (!finite) {
      status = SolveStatus::Diverged;
      r = std::numeric_limits<double>::infinity();
      record_point(report, cfg, method, n, r, gamma, x, nullptr);
      break;
    }

    prox_into(f, gamma, w.flat(), prox_w.flat());
    r = distance(x, prox_w) / (1.0 + norm(x));

    const bool stop_conv = r <= cfg.tol;
    const bool stop_max = n >= cfg.max_iters;
    if (stop_conv || stop_max || n % cfg.trace_every == 0)
      record_point(report, cfg, method, n, r, gamma, x, &prox_w);
    if (stop_conv) {
      status = SolveStatus::Converged;
      break;
    }
    if (stop_max) {
      status = SolveStatus::MaxIters;
      break;
    }

    if (method == Method::Fbf) {
      // y = x - gamma (B x + a_n); p = prox(y) + b_n;
      // q = p - gamma (B p + c_n); x_next = x - y + q
      const BlockVector* y_ptr = &w;
      const BlockVector* p_ptr = &prox_w;
      if (use_a) {
        error_term(cfg.errors_a, cfg.seed, 0, n, err);
        add_scaled(w, -gamma, err, y);
        y_ptr = &y;
        prox_into(f, gamma, y.flat(), p.flat());
        p_ptr = &p;
      }
      if (use_b) {
        if (p_ptr != &p) {
          p = *p_ptr;
          p_ptr = &p;
        }
        error_term(cfg.errors_b, cfg.seed, 1, n, err);
        axpy_inplace(1.0, err, p);
      }
      b.apply_into(*p_ptr, bp);
      if (use_c) {
        error_term(cfg.errors_c, cfg.seed, 2, n, err);
        axpy_inplace(1.0, err, bp);  // bp = B p + c_n
      }
      add_scaled(*p_ptr, -gamma, bp, q);
      combine(x, *y_ptr, q, xn);
      std::swap(x, xn);
    } else {
      // y = x - gamma (B x + a_n); x_next = prox(y) + b_n
      if (use_a) {
        error_term(cfg.errors_a, cfg.seed, 0, n, err);
        add_scaled(w, -gamma, err, y);
        prox_into(f, gamma, y.flat(), xn.flat());
      } else {
        std::swap(xn, prox_w);
      }
      if (use_b) {
        error_term(cfg.errors_b, cfg.seed, 1, n, err);
        axpy_inplace(1.0, err, xn);
      }
      std::swap(x, xn);
    }
  }

  report.status = status;
  report.iterations = n;
  report.final_residual = r;
  report.gamma_last = gamma;
  if (status != SolveStatus::Diverged) report.final_xp_gap = distance(x, prox_w);
  report.final_x = std::move(x);

  if (method == Method::Fb && cfg.capture_iterates &&
      status != SolveStatus::Diverged) {
    BlockVector b_final(layout), b_snap(layout), d(layout);
    b.apply_into(report.final_x, b_final);
    report.grad_gap_trace.reserve(report.trace.size());
    for (const TracePoint& tp : report.trace) {
      if (!tp.x) continue;
      b.apply_into(*tp.x, b_snap);
      add_scaled(b_snap, -1.0, b_final, d);
      report.grad_gap_trace.push_back(norm(d));
    }
  }
  return report;
}

}  // namespace

ErrorSchedule make_zero_errors() { return {}; }

ErrorSchedule make_geometric_errors(double rho, double magnitude,
                                    std::uint64_t seed) {
  if (!(rho >= 0.0) || rho >= 1.0)
    throw ValidationError(
        "geometric errors: rho must lie in [0, 1[ (otherwise not summable)");
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude))
    throw ValidationError("geometric errors: magnitude must be finite and >= 0");
  ErrorSchedule s;
  s.kind = ErrorSchedule::Kind::Geometric;
  s.rho = rho;
  s.magnitude = magnitude;
  s.seed = seed;
  return s;
}

void error_term(const ErrorSchedule& schedule, std::uint64_t base_seed,
                int channel, long n, BlockVector& out) {
  if (schedule.is_zero()) {
    out.set_zero();
    return;
  }
  const std::uint64_t stream = Rng::mix(
      Rng::mix(Rng::mix(base_seed, schedule.seed),
               static_cast<std::uint64_t>(channel)),
      static_cast<std::uint64_t>(n));
  Rng rng(stream);
  auto flat = out.flat();
  double n2 = 0.0;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    flat[i] = rng.gaussian();
    n2 += flat[i] * flat[i];
  }
  double nn = std::sqrt(n2);
  if (nn < 1e-12) {
    out.set_zero();
    flat[0] = 1.0;
    nn = 1.0;
  }
  const double scale =
      schedule.magnitude * std::pow(schedule.rho, static_cast<double>(n)) / nn;
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i] *= scale;
}

StepDefaults default_gamma(double chi, Method method) {
  if (chi <= 0.0) return {0.05, 1.0};
  const double gamma = (method == Method::Fbf ? 0.9 : 1.8) / chi;
  return {derive_epsilon(method, chi, gamma), gamma};
}

double residual(const ProxFunction& f, const MonotoneOperator& b,
                const BlockVector& x, double gamma) {
  if (!(gamma > 0.0)) throw ValidationError("residual: gamma must be > 0");
  BlockVector bx(b.layout()), w(b.layout()), pw(b.layout());
  b.apply_into(x, bx);
  add_scaled(x, -gamma, bx, w);
  prox_into(f, gamma, w.flat(), pw.flat());
  return distance(x, pw) / (1.0 + norm(x));
}

SolveReport solve_fbf(const ProxFunction& f, const MonotoneOperator& b,
                      const BlockVector& x0, const SolverConfig& cfg) {
  if (cfg.method != Method::Fbf)
    throw ConfigError("solve_fbf called with a non-Fbf configuration");
  return run_splitting(Method::Fbf, f, b, x0, cfg);
}

SolveReport solve_fb(const ProxFunction& f, const MonotoneOperator& b,
                     const BlockVector& x0, const SolverConfig& cfg) {
  if (cfg.method != Method::Fb)
    throw ConfigError("solve_fb called with a non-Fb configuration");
  return run_splitting(Method::Fb, f, b, x0, cfg);
}

}  // namespace nashsplit
