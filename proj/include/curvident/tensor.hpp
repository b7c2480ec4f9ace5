#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

#include "curvident/scalar.hpp"

namespace curvident {

/// Dense tensor over Q(sqrt 3) in an orthonormal frame.
///
/// All indices are lower; components are stored row-major, so the last
/// index varies fastest. Indices are 0-based in the C++ API and 1-based in
/// the JSON interchange format.
class Tensor {
 public:
  static constexpr int kMinDim = 2;
  static constexpr int kMaxDim = 6;
  static constexpr int kMaxRank = 8;

  Tensor() : Tensor(kMinDim, 0) {}
  Tensor(int dim, int rank);

  static Tensor scalar(int dim, Scalar value);
  /// The metric g_{ij} = delta_{ij}.
  static Tensor metric(int dim);

  int dim() const noexcept { return dim_; }
  int rank() const noexcept { return rank_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const Scalar> data() const noexcept { return data_; }
  std::span<Scalar> data() noexcept { return data_; }
  const Scalar& operator[](std::size_t linear) const { return data_[linear]; }
  Scalar& operator[](std::size_t linear) { return data_[linear]; }

  std::size_t offset(std::span<const int> idx) const;
  std::size_t offset(std::initializer_list<int> idx) const {
    return offset(std::span<const int>(idx.begin(), idx.size()));
  }
  /// Inverse of offset().
  std::vector<int> multi_index(std::size_t linear) const;

  const Scalar& at(std::span<const int> idx) const { return data_[offset(idx)]; }
  Scalar& at(std::span<const int> idx) { return data_[offset(idx)]; }
  const Scalar& at(std::initializer_list<int> idx) const { return data_[offset(idx)]; }
  Scalar& at(std::initializer_list<int> idx) { return data_[offset(idx)]; }

  /// Value of a rank-0 tensor.
  const Scalar& value() const;

  bool is_zero() const;
  /// Linear offset of the first nonzero component, or size() if none.
  std::size_t first_nonzero() const;

  /// Axis permutation: result(i_0..i_{r-1}) = (*this)(j) with j[axes[k]] = i_k,
  /// i.e. output axis k is input axis axes[k] (numpy transpose convention).
  Tensor transposed(std::span<const int> axes) const;
  Tensor transposed(std::initializer_list<int> axes) const {
    return transposed(std::span<const int>(axes.begin(), axes.size()));
  }

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(const Scalar& factor);
  /// this += factor * other.
  Tensor& add_scaled(const Tensor& other, const Scalar& factor);
  Tensor operator-() const;

  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(Tensor a, const Scalar& s) { return a *= s; }
  friend Tensor operator*(const Scalar& s, Tensor a) { return a *= s; }

 private:
  void check_same_shape(const Tensor& other, const char* what) const;

  int dim_;
  int rank_;
  std::vector<Scalar> data_;
};

/// Exact componentwise equality. Throws ShapeError on dim/rank mismatch.
bool tensors_equal(const Tensor& a, const Tensor& b);
bool is_zero(const Tensor& t);

/// (a (x) b)(i..., j...) = a(i...) b(j...).
Tensor tensor_product(const Tensor& a, const Tensor& b);

/// One axis of one operand in a contraction.
struct AxisRef {
  int operand = 0;
  int axis = 0;
  friend bool operator==(const AxisRef&, const AxisRef&) = default;
};

/// Einstein-summation plan: every operand axis is either bound to exactly one
/// other axis (summed) or listed once in `free` (output order).
struct ContractionSpec {
  std::vector<std::pair<AxisRef, AxisRef>> bound;
  std::vector<AxisRef> free;

  /// Builds a spec from index notation such as "iabc,jabc->ij". A label
  /// appearing twice on the left is summed; a label appearing once must
  /// appear on the right.
  static ContractionSpec parse(std::string_view expr);
};

using TensorRefs = std::vector<std::reference_wrapper<const Tensor>>;

/// Exact contraction of `operands` according to `spec`. The result does not
/// depend on the internal pairwise order because arithmetic is exact.
Tensor contract(const TensorRefs& operands, const ContractionSpec& spec);

/// contract() with a spec given in index notation.
Tensor einsum(std::string_view expr, const TensorRefs& operands);

}  // namespace curvident
