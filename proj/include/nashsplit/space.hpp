#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nashsplit/errors.hpp"

namespace nashsplit {

/// Shape of the product space H = H_1 x ... x H_m: one dimension per player.
class SpaceLayout {
 public:
  explicit SpaceLayout(std::vector<int> dims);
  static SpaceLayout single(int n) { return SpaceLayout({n}); }

  int blocks() const { return static_cast<int>(dims_.size()); }
  int dim(int i) const { return dims_[static_cast<std::size_t>(i)]; }
  int offset(int i) const { return offsets_[static_cast<std::size_t>(i)]; }
  int total_dim() const { return total_; }
  const std::vector<int>& dims() const { return dims_; }

  bool operator==(const SpaceLayout& other) const { return dims_ == other.dims_; }
  bool operator!=(const SpaceLayout& other) const { return !(*this == other); }

  std::string describe() const;

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int total_ = 0;
};

/// Element of the product space, stored flat with per-block views.
class BlockVector {
 public:
  explicit BlockVector(SpaceLayout layout);
  BlockVector(SpaceLayout layout, std::vector<double> flat);
  static BlockVector from_blocks(const std::vector<std::vector<double>>& blocks);

  const SpaceLayout& layout() const { return layout_; }
  int total_dim() const { return layout_.total_dim(); }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }
  std::span<double> block(int i);
  std::span<const double> block(int i) const;

  double& operator[](int i) { return data_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return data_[static_cast<std::size_t>(i)]; }

  void set_zero();
  bool all_finite() const;

 private:
  SpaceLayout layout_;
  std::vector<double> data_;
};

double dot(const BlockVector& x, const BlockVector& y);
double norm(const BlockVector& x);
/// alpha * x + y (new vector).
BlockVector axpy(double alpha, const BlockVector& x, const BlockVector& y);
/// y += alpha * x
void axpy_inplace(double alpha, const BlockVector& x, BlockVector& y);
/// z = x + alpha * y
void add_scaled(const BlockVector& x, double alpha, const BlockVector& y,
                BlockVector& z);
/// z = x - y + q
void combine(const BlockVector& x, const BlockVector& y, const BlockVector& q,
             BlockVector& z);

/// Dense real matrix acting between blocks.
class LinearMap {
 public:
  LinearMap(int rows, int cols);  // zero matrix
  explicit LinearMap(const std::vector<std::vector<double>>& rows);
  LinearMap(int rows, int cols, std::vector<double> row_major);
  static LinearMap identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double at(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  double& at(int r, int c) {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  std::span<const double> row_major() const { return data_; }

  void apply(std::span<const double> x, std::span<double> out) const;
  void apply_adjoint(std::span<const double> x, std::span<double> out) const;
  LinearMap transposed() const;

  double max_abs() const;
  bool is_zero() const;
  bool is_identity() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;  // row-major
};

/// Largest singular value, relative accuracy ~1e-8. Power iteration on L^T L
/// with a deterministic start; a second fixed start guards against the first
/// one landing in an invariant subspace of a smaller eigenvalue.
double spectral_norm(const LinearMap& map);

/// Gaussian elimination with partial pivoting. Empty optional if singular.
std::optional<std::vector<double>> solve_dense(const LinearMap& a,
                                               std::span<const double> b);

}  // namespace nashsplit
