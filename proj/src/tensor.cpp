#include "gg/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace gg {

namespace {
int64_t shape_size(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (int64_t d : shape) {
    if (d <= 0) throw DimensionError("tensor dimensions must be positive");
    n *= d;
  }
  return n;
}
}  // namespace

Tensor Tensor::zeros(std::vector<int64_t> shape) {
  Tensor t;
  int64_t n = shape_size(shape);
  t.shape = std::move(shape);
  t.data.assign(static_cast<size_t>(n), 0.0);
  return t;
}

Tensor Tensor::full(std::vector<int64_t> shape, double value) {
  Tensor t = zeros(std::move(shape));
  t.fill(value);
  return t;
}

Tensor Tensor::scalar(double value) {
  Tensor t;
  t.shape = {1};
  t.data = {value};
  return t;
}

Tensor Tensor::row(std::vector<double> values) {
  if (values.empty()) throw DimensionError("tensor row: empty values");
  Tensor t;
  t.shape = {static_cast<int64_t>(values.size())};
  t.data = std::move(values);
  return t;
}

Tensor Tensor::matrix(int64_t rows, int64_t cols, std::vector<double> values) {
  Tensor t;
  t.shape = {rows, cols};
  if (shape_size(t.shape) != static_cast<int64_t>(values.size())) {
    throw DimensionError("tensor matrix: values do not fill " + t.shape_str());
  }
  t.data = std::move(values);
  return t;
}

Tensor Tensor::identity(int64_t n) {
  Tensor t = zeros({n, n});
  for (int64_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

int64_t Tensor::rows() const {
  if (rank() != 2) throw DimensionError("rows() on tensor of shape " + shape_str());
  return shape[0];
}

int64_t Tensor::cols() const {
  if (rank() != 2) throw DimensionError("cols() on tensor of shape " + shape_str());
  return shape[1];
}

bool Tensor::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Tensor::fill(double value) {
  for (double& v : data) v = value;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << " x ";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

}  // namespace gg
