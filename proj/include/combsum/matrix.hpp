#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace combsum {

/// Dense row-major n×n matrix.
template <typename T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, const T& fill = T{}) : n_(n), data_(n * n, fill) {}
  SquareMatrix(std::size_t n, std::vector<T> data) : n_(n), data_(std::move(data)) {
    if (data_.size() != n_ * n_) {
      throw std::invalid_argument("SquareMatrix: data size does not match n*n");
    }
  }

  std::size_t size() const noexcept { return n_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

  std::span<const T> data() const noexcept { return data_; }
  std::span<T> data() noexcept { return data_; }

  bool operator==(const SquareMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

}  // namespace combsum
