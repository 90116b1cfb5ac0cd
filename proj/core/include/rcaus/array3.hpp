#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rcaus {

/// Dense row-major 3D array; the last axis is contiguous.
template <class T>
class Array3 {
 public:
  Array3() = default;
  Array3(std::size_t n0, std::size_t n1, std::size_t n2, T fill = T{})
      : dims_{n0, n1, n2}, data_(n0 * n1 * n2, fill) {}

  std::size_t dim(std::size_t axis) const { return dims_.at(axis); }
  const std::array<std::size_t, 3>& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }

  /// Contiguous run along the last axis.
  std::span<T> lane(std::size_t i, std::size_t j) {
    return {data_.data() + (i * dims_[1] + j) * dims_[2], dims_[2]};
  }
  std::span<const T> lane(std::size_t i, std::size_t j) const {
    return {data_.data() + (i * dims_[1] + j) * dims_[2], dims_[2]};
  }

  /// Contiguous (n1 x n2) block for a fixed first index.
  std::span<T> slab(std::size_t i) { return {data_.data() + i * dims_[1] * dims_[2], dims_[1] * dims_[2]}; }
  std::span<const T> slab(std::size_t i) const {
    return {data_.data() + i * dims_[1] * dims_[2], dims_[1] * dims_[2]};
  }

  std::span<T> flat() { return data_; }
  std::span<const T> flat() const { return data_; }
  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  /// Reinterpret with new dimensions of the same total size.
  void reshape(std::size_t n0, std::size_t n1, std::size_t n2) {
    if (n0 * n1 * n2 != data_.size()) throw std::invalid_argument("Array3::reshape: size mismatch");
    dims_ = {n0, n1, n2};
  }

  friend bool operator==(const Array3&, const Array3&) = default;

 private:
  std::array<std::size_t, 3> dims_{0, 0, 0};
  std::vector<T> data_;
};

}  // namespace rcaus
