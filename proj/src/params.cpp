#include "gg/params.hpp"

#include <cmath>

#include "gg/error.hpp"

namespace gg {

GradStore::GradStore(const ParameterSet& set) : grads_(set.block_count()) {}

Tensor& GradStore::slot(const ParameterBlock& block) {
  auto& t = grads_.at(static_cast<size_t>(block.index));
  if (t.data.empty()) t = Tensor::zeros(block.value.shape);
  return t;
}

const Tensor* GradStore::peek(const ParameterBlock& block) const {
  const auto& t = grads_.at(static_cast<size_t>(block.index));
  return t.data.empty() ? nullptr : &t;
}

void GradStore::clear() {
  for (auto& t : grads_) t = Tensor();
}

ParameterBlock& ParameterSet::add(const std::string& name, std::vector<int64_t> shape,
                                  ParamInit init) {
  if (find(name)) throw ConfigError("duplicate parameter block: " + name);
  auto block = std::make_unique<ParameterBlock>();
  block->name = name;
  block->value = Tensor::zeros(shape);
  block->grad = Tensor::zeros(shape);
  block->adam_m = Tensor::zeros(shape);
  block->adam_v = Tensor::zeros(std::move(shape));
  block->index = static_cast<int32_t>(blocks_.size());
  block->init = init;
  blocks_.push_back(std::move(block));
  return *blocks_.back();
}

void ParameterSet::init(uint64_t seed, double range) {
  Rng rng(mix_seed({seed, 0x706172616dULL}));
  for (auto& block : blocks_) {
    if (block->init == ParamInit::kZero) {
      block->value.fill(0.0);
      continue;
    }
    for (double& v : block->value.data) v = rng.uniform(-range, range);
  }
}

ParameterBlock* ParameterSet::find(const std::string& name) {
  for (auto& block : blocks_) {
    if (block->name == name) return block.get();
  }
  return nullptr;
}

const ParameterBlock* ParameterSet::find(const std::string& name) const {
  return const_cast<ParameterSet*>(this)->find(name);
}

int64_t ParameterSet::parameter_count() const {
  int64_t n = 0;
  for (const auto& block : blocks_) n += block->value.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& block : blocks_) block->grad.fill(0.0);
}

void ParameterSet::accumulate_grad(const GradStore& store, double scale) {
  if (store.grads_.size() != blocks_.size()) {
    throw DimensionError("grad store does not match parameter set");
  }
  for (size_t i = 0; i < blocks_.size(); ++i) {
    const Tensor& g = store.grads_[i];
    if (g.data.empty()) continue;
    Tensor& dst = blocks_[i]->grad;
    for (int64_t k = 0; k < dst.size(); ++k) dst[k] += scale * g[k];
  }
}

double ParameterSet::grad_norm() const {
  double sq = 0.0;
  for (const auto& block : blocks_) {
    for (double g : block->grad.data) sq += g * g;
  }
  return std::sqrt(sq);
}

void ParameterSet::clip_grad_norm(double max_norm) {
  double norm = grad_norm();
  if (norm <= max_norm || norm == 0.0) return;
  double factor = max_norm / norm;
  for (auto& block : blocks_) {
    for (double& g : block->grad.data) g *= factor;
  }
}

void ParameterSet::adam_step(double learning_rate, double beta1, double beta2,
                             double epsilon) {
  for (auto& block : blocks_) {
    if (!block->grad.all_finite()) {
      throw DivergenceError("non-finite gradient in parameter block '" + block->name + "'");
    }
  }
  for (auto& block : blocks_) {
    block->step += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(block->step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(block->step));
    for (int64_t k = 0; k < block->value.size(); ++k) {
      const double g = block->grad[k];
      double& m = block->adam_m[k];
      double& v = block->adam_v[k];
      m = beta1 * m + (1.0 - beta1) * g;
      v = beta2 * v + (1.0 - beta2) * g * g;
      const double m_hat = m / bc1;
      const double v_hat = v / bc2;
      block->value[k] -= learning_rate * m_hat / (std::sqrt(v_hat) + epsilon);
    }
    block->grad.fill(0.0);
    if (!block->value.all_finite()) {
      throw DivergenceError("non-finite value in parameter block '" + block->name + "'");
    }
  }
}

}  // namespace gg
