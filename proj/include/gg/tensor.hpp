#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gg/error.hpp"

namespace gg {

// Dense row-major tensor of doubles, rank 1 or 2. Rank 0 is represented as a
// rank-1 tensor of size 1.
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<double> data;

  Tensor() = default;

  static Tensor zeros(std::vector<int64_t> shape);
  static Tensor full(std::vector<int64_t> shape, double value);
  static Tensor scalar(double value);
  static Tensor row(std::vector<double> values);
  static Tensor matrix(int64_t rows, int64_t cols, std::vector<double> values);
  static Tensor identity(int64_t n);

  int64_t size() const { return static_cast<int64_t>(data.size()); }
  int64_t rank() const { return static_cast<int64_t>(shape.size()); }
  int64_t dim(int64_t i) const { return shape[static_cast<size_t>(i)]; }
  int64_t rows() const;
  int64_t cols() const;

  double& operator[](int64_t i) { return data[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const { return data[static_cast<size_t>(i)]; }
  double& at(int64_t r, int64_t c) { return data[static_cast<size_t>(r * cols() + c)]; }
  double at(int64_t r, int64_t c) const { return data[static_cast<size_t>(r * cols() + c)]; }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
  bool all_finite() const;
  void fill(double value);

  std::string shape_str() const;  // e.g. "[3 x 4]"
};

}  // namespace gg
