#include "demix/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace demix {

Index profile_dim(const Profile& p) {
  Index d = 0;
  for (const auto& b : p) d += b.rows * b.cols;
  return d;
}

MatrixTuple::MatrixTuple(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw std::invalid_argument("MatrixTuple: needs at least one block");
  for (const auto& b : blocks_) {
    if (b.rows() < 1 || b.cols() < 1)
      throw std::invalid_argument("MatrixTuple: blocks must be at least 1x1");
    if (!b.allFinite()) throw std::invalid_argument("MatrixTuple: non-finite entries");
  }
}

MatrixTuple MatrixTuple::zero(const Profile& profile) {
  if (profile.empty()) throw std::invalid_argument("MatrixTuple: empty profile");
  std::vector<Matrix> blocks;
  blocks.reserve(profile.size());
  for (const auto& s : profile) {
    if (s.rows < 1 || s.cols < 1)
      throw std::invalid_argument("MatrixTuple: blocks must be at least 1x1");
    blocks.push_back(Matrix::Zero(s.rows, s.cols));
  }
  MatrixTuple t;
  t.blocks_ = std::move(blocks);
  return t;
}

Profile MatrixTuple::profile() const {
  Profile p;
  p.reserve(blocks_.size());
  for (const auto& b : blocks_) p.push_back({b.rows(), b.cols()});
  return p;
}

bool MatrixTuple::same_profile(const MatrixTuple& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].rows() != other.blocks_[i].rows() ||
        blocks_[i].cols() != other.blocks_[i].cols())
      return false;
  }
  return true;
}

Index MatrixTuple::dim() const {
  Index d = 0;
  for (const auto& b : blocks_) d += b.size();
  return d;
}

bool MatrixTuple::all_finite() const {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [](const Matrix& b) { return b.allFinite(); });
}

void MatrixTuple::set_zero() {
  for (auto& b : blocks_) b.setZero();
}

Vector MatrixTuple::vec() const {
  Vector v(dim());
  Index off = 0;
  for (const auto& b : blocks_) {
    v.segment(off, b.size()) = Eigen::Map<const Vector>(b.data(), b.size());
    off += b.size();
  }
  return v;
}

MatrixTuple MatrixTuple::from_vec(const Profile& profile, const Vector& v) {
  if (v.size() != profile_dim(profile))
    throw std::invalid_argument("MatrixTuple::from_vec: length mismatch");
  MatrixTuple t = zero(profile);
  Index off = 0;
  for (auto& b : t.blocks_) {
    b = Eigen::Map<const Matrix>(v.data() + off, b.rows(), b.cols());
    off += b.size();
  }
  return t;
}

MatrixTuple& MatrixTuple::operator+=(const MatrixTuple& other) {
  if (!same_profile(other)) throw std::invalid_argument("MatrixTuple: shape mismatch");
  for (size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += other.blocks_[i];
  return *this;
}

MatrixTuple& MatrixTuple::operator-=(const MatrixTuple& other) {
  if (!same_profile(other)) throw std::invalid_argument("MatrixTuple: shape mismatch");
  for (size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= other.blocks_[i];
  return *this;
}

MatrixTuple& MatrixTuple::operator*=(Complex scale) {
  for (auto& b : blocks_) b *= scale;
  return *this;
}

MatrixTuple& MatrixTuple::operator*=(double scale) {
  for (auto& b : blocks_) b *= scale;
  return *this;
}

SupportPattern::SupportPattern(Profile dims, std::vector<std::vector<Index>> sets)
    : dims_(std::move(dims)), sets_(std::move(sets)) {
  if (sets_.size() != dims_.size())
    throw std::invalid_argument("SupportPattern: component count mismatch");
  for (size_t i = 0; i < sets_.size(); ++i) {
    auto& s = sets_[i];
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw std::invalid_argument("SupportPattern: duplicate index");
    if (!s.empty() && (s.front() < 0 || s.back() >= dims_[i].cols))
      throw std::invalid_argument("SupportPattern: index out of range");
  }
}

SupportPattern SupportPattern::full(const Profile& profile) {
  std::vector<std::vector<Index>> sets(profile.size());
  for (size_t i = 0; i < profile.size(); ++i) {
    sets[i].resize(static_cast<size_t>(profile[i].cols));
    for (Index j = 0; j < profile[i].cols; ++j) sets[i][static_cast<size_t>(j)] = j;
  }
  return SupportPattern(profile, std::move(sets));
}

SupportPattern SupportPattern::empty_pattern(const Profile& profile) {
  return SupportPattern(profile, std::vector<std::vector<Index>>(profile.size()));
}

Index SupportPattern::total_sparsity() const {
  Index s = 0;
  for (const auto& set : sets_) s += static_cast<Index>(set.size());
  return s;
}

Index SupportPattern::subspace_dim() const {
  Index d = 0;
  for (size_t i = 0; i < sets_.size(); ++i)
    d += static_cast<Index>(sets_[i].size()) * dims_[i].rows;
  return d;
}

bool SupportPattern::contains(int i, Index j) const {
  const auto& s = sets_[static_cast<size_t>(i)];
  return std::binary_search(s.begin(), s.end(), j);
}

bool SupportPattern::is_full() const {
  for (size_t i = 0; i < sets_.size(); ++i)
    if (static_cast<Index>(sets_[i].size()) != dims_[i].cols) return false;
  return true;
}

SupportPattern SupportPattern::complement() const {
  std::vector<std::vector<Index>> comp(sets_.size());
  for (size_t i = 0; i < sets_.size(); ++i) {
    const auto& s = sets_[i];
    size_t pos = 0;
    for (Index j = 0; j < dims_[i].cols; ++j) {
      if (pos < s.size() && s[pos] == j) {
        ++pos;
      } else {
        comp[i].push_back(j);
      }
    }
  }
  return SupportPattern(dims_, std::move(comp));
}

}  // namespace demix
