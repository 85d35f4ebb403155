#pragma once

#include <span>
#include <vector>

#include "nashsplit/space.hpp"

namespace nashsplit {

/// Descriptor of a proper lsc convex function with an evaluable proximity
/// operator. Everything in the catalog is either the zero function or a set
/// indicator, whose prox is the Euclidean projection.
///
/// Elementary variants act on the whole flat vector of their layout;
/// SeparableSum / ProductSet split the evaluation per block.
class ProxFunction {
 public:
  enum class Kind {
    Zero,
    Box,
    Ball,
    Halfspace,
    Simplex,            // { x >= 0, sum x = 1 }
    CanonicalSimplex,   // { x >= 0, sum x <= 1 }
    Affine,             // { <a,x> = b }
    SeparableSum,
    ProductSet,
  };

  static ProxFunction zero(SpaceLayout layout);
  static ProxFunction box(SpaceLayout layout, std::vector<double> lo,
                          std::vector<double> hi);
  static ProxFunction ball(SpaceLayout layout, std::vector<double> center,
                           double radius);
  static ProxFunction halfspace(SpaceLayout layout, std::vector<double> normal,
                                double offset);
  static ProxFunction simplex(SpaceLayout layout);
  static ProxFunction canonical_simplex(SpaceLayout layout);
  static ProxFunction affine(SpaceLayout layout, std::vector<double> normal,
                             double offset);
  static ProxFunction separable_sum(SpaceLayout layout,
                                    std::vector<ProxFunction> parts);
  static ProxFunction product_set(SpaceLayout layout,
                                  std::vector<ProxFunction> parts);

  Kind kind() const { return kind_; }
  const SpaceLayout& layout() const { return layout_; }
  /// True when the function is the indicator of a closed convex set
  /// (recursively so for the composite variants).
  bool is_indicator() const;

  const std::vector<ProxFunction>& parts() const { return parts_; }
  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }
  const std::vector<double>& center() const { return center_; }
  const std::vector<double>& normal() const { return normal_; }
  double radius() const { return radius_; }
  double offset() const { return offset_; }

 private:
  ProxFunction(Kind kind, SpaceLayout layout);

  Kind kind_;
  SpaceLayout layout_;
  std::vector<ProxFunction> parts_;
  std::vector<double> lo_, hi_;      // Box
  std::vector<double> center_;       // Ball
  std::vector<double> normal_;       // Halfspace / Affine
  double radius_ = 0.0;
  double offset_ = 0.0;
};

/// prox_{gamma f}(x). For indicator variants this is the projection and does
/// not depend on gamma.
BlockVector prox(const ProxFunction& f, double gamma, const BlockVector& x);

/// Flat-span version used internally and by composite variants.
void prox_into(const ProxFunction& f, double gamma, std::span<const double> x,
               std::span<double> out);

/// Euclidean projection onto the probability simplex (sort-and-threshold).
std::vector<double> project_simplex(std::span<const double> v);

/// || x - P_C x || for indicator variants; zero iff x is in the set.
double membership_residual(const ProxFunction& f, const BlockVector& x);

}  // namespace nashsplit
