#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nashsplit/space.hpp"

namespace nashsplit {

/// Full stacked gradient callback: out_i = grad_i g_i(x) for every player.
using GradientFn = std::function<void(const BlockVector&, BlockVector&)>;

/// Where the operator's Lipschitz constant came from.
enum class ChiSource { Computed, Declared, Overridden };

/// Single-valued monotone operator B : H -> H stacking the players' partial
/// gradients, with its Lipschitz constant chi and an optional (1/chi)-
/// cocoercivity guarantee.
class MonotoneOperator {
 public:
  enum class Kind { ZeroSum, Saddle, Cyclic, Custom };

  /// B(x1, x2) = (L x2, -L^T x1); chi = ||L||, not cocoercive (skew part).
  static MonotoneOperator zero_sum(LinearMap l);
  /// B(x1, x2) = (Q1 x1 + M x2, Q2 x2 - M^T x1) with Q1, Q2 symmetric PSD;
  /// chi = norm of the stacked map, not cocoercive.
  static MonotoneOperator saddle(LinearMap q1, LinearMap m, LinearMap q2);
  /// Block i of B x is L_i^T (L_i x_i - L_{i+1} x_{i+1}), cyclically;
  /// chi = 2 max_i ||L_i||^2 and B is (1/chi)-cocoercive.
  static MonotoneOperator cyclic(std::vector<LinearMap> maps);
  /// User-supplied stacked gradient with declared constants.
  static MonotoneOperator custom(SpaceLayout layout, GradientFn grad, double chi,
                                 bool cocoercive);
  /// B x = A x_flat + c, re-split into blocks; chi = ||A||. Set cocoercive
  /// only for symmetric PSD A (validated).
  static MonotoneOperator linear(SpaceLayout layout, LinearMap a,
                                 std::vector<double> offset, bool cocoercive = false);

  void apply_into(const BlockVector& x, BlockVector& out) const;
  BlockVector apply(const BlockVector& x) const;

  Kind kind() const { return kind_; }
  const SpaceLayout& layout() const { return layout_; }
  double chi() const { return chi_; }
  bool cocoercive() const { return cocoercive_; }
  ChiSource chi_source() const { return chi_source_; }

  /// Replace the computed constant; flagged in checker reports.
  MonotoneOperator with_chi(double chi) const;

  // Introspection for serialization; null when the kind does not carry it.
  const LinearMap* zero_sum_matrix() const;
  const LinearMap* saddle_q1() const;
  const LinearMap* saddle_m() const;
  const LinearMap* saddle_q2() const;
  const std::vector<LinearMap>* cyclic_maps() const;
  const LinearMap* linear_matrix() const;
  const std::vector<double>* linear_offset() const;

 private:
  MonotoneOperator(Kind kind, SpaceLayout layout);

  Kind kind_;
  SpaceLayout layout_;
  double chi_ = 0.0;
  bool cocoercive_ = false;
  ChiSource chi_source_ = ChiSource::Computed;

  std::vector<LinearMap> maps_;       // ZeroSum: {L}; Saddle: {Q1, M, Q2};
                                      // Cyclic: {L_1..L_m}; linear: {A}
  std::vector<double> offset_;        // linear kind
  bool identity_maps_ = false;        // Cyclic fast path
  GradientFn grad_;                   // Custom kind
};

struct MonotonicityReport {
  int samples = 0;
  double min_inner = 0.0;   // min over pairs of <Bx - By, x - y>
  double worst_margin = 0.0;  // min of inner + 1e-10 (1 + |x-y|^2)
  bool pass = false;
};

struct LipschitzReport {
  int samples = 0;
  double max_ratio = 0.0;  // max over pairs of |Bx - By| / |x - y|
  double chi = 0.0;        // constant the ratio was tested against
  ChiSource chi_source = ChiSource::Computed;
  bool pass = false;
};

struct CocoercivityReport {
  int samples = 0;
  double min_slack = 0.0;  // min of <Bx - By, x - y> - (1/chi) |Bx - By|^2
  double chi = 0.0;
  bool pass = false;
};

/// Samples pairs of standard-normal points and reports the worst violation of
/// the monotonicity inequality. PASS tolerates -1e-10 (1 + |x-y|^2).
MonotonicityReport check_monotone(const MonotoneOperator& b, int samples,
                                  std::uint64_t seed);

/// Worst Lipschitz ratio over sampled pairs, tested against `chi` if given
/// and the operator's own constant otherwise.
LipschitzReport check_lipschitz(const MonotoneOperator& b, int samples,
                                std::uint64_t seed,
                                std::optional<double> chi = std::nullopt);

/// Worst cocoercivity slack over sampled pairs. Requires the operator to
/// declare cocoercivity.
CocoercivityReport check_cocoercive(const MonotoneOperator& b, int samples,
                                    std::uint64_t seed);

/// Central-difference approximation of grad_i g(x) over block i.
std::vector<double> finite_difference_gradient(
    const std::function<double(const BlockVector&)>& g, int player,
    const BlockVector& x, double h);

}  // namespace nashsplit
