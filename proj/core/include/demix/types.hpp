#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace demix {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Shape of one component matrix: k rows (filter-space dimension) by
/// n columns (signal-space dimension).
struct BlockShape {
  Index rows = 0;
  Index cols = 0;

  friend bool operator==(const BlockShape& a, const BlockShape& b) {
    return a.rows == b.rows && a.cols == b.cols;
  }
};

/// (k_i, n_i) shapes of all r components.
using Profile = std::vector<BlockShape>;

Index profile_dim(const Profile& p);

/// A tuple (Z_1, ..., Z_r) of complex k_i x n_i matrices. The shapes are
/// fixed at construction; entries are mutable value semantics.
class MatrixTuple {
 public:
  MatrixTuple() = default;
  explicit MatrixTuple(std::vector<Matrix> blocks);

  static MatrixTuple zero(const Profile& profile);

  int components() const { return static_cast<int>(blocks_.size()); }
  const Matrix& block(int i) const { return blocks_[static_cast<size_t>(i)]; }
  Matrix& block(int i) { return blocks_[static_cast<size_t>(i)]; }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  Profile profile() const;
  bool same_profile(const MatrixTuple& other) const;

  /// Total number of complex entries, sum k_i * n_i.
  Index dim() const;

  bool all_finite() const;
  void set_zero();

  /// Stacks blocks in order, each column-major, i.e. coordinate order
  /// (component, column, row).
  Vector vec() const;
  static MatrixTuple from_vec(const Profile& profile, const Vector& v);

  MatrixTuple& operator+=(const MatrixTuple& other);
  MatrixTuple& operator-=(const MatrixTuple& other);
  MatrixTuple& operator*=(Complex scale);
  MatrixTuple& operator*=(double scale);

  friend MatrixTuple operator+(MatrixTuple a, const MatrixTuple& b) { return a += b; }
  friend MatrixTuple operator-(MatrixTuple a, const MatrixTuple& b) { return a -= b; }
  friend MatrixTuple operator*(double s, MatrixTuple a) { return a *= s; }
  friend MatrixTuple operator*(Complex s, MatrixTuple a) { return a *= s; }

 private:
  std::vector<Matrix> blocks_;
};

/// Column index sets S_i per component, kept sorted and duplicate-free,
/// together with the (k_i, n_i) profile they refer to.
class SupportPattern {
 public:
  SupportPattern() = default;
  SupportPattern(Profile dims, std::vector<std::vector<Index>> sets);

  static SupportPattern full(const Profile& profile);
  static SupportPattern empty_pattern(const Profile& profile);

  const Profile& dims() const { return dims_; }
  int components() const { return static_cast<int>(sets_.size()); }
  const std::vector<Index>& set(int i) const { return sets_[static_cast<size_t>(i)]; }

  Index sparsity(int i) const { return static_cast<Index>(sets_[static_cast<size_t>(i)].size()); }
  /// s = sum of the s_i.
  Index total_sparsity() const;
  /// Dimension of the subspace of tuples supported on the pattern, sum s_i * k_i.
  Index subspace_dim() const;

  bool contains(int i, Index j) const;
  bool is_full() const;
  SupportPattern complement() const;

  bool matches(const Profile& profile) const { return profile == dims_; }

 private:
  Profile dims_;
  std::vector<std::vector<Index>> sets_;
};

}  // namespace demix
