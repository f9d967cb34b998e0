#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gg/rng.hpp"
#include "gg/tensor.hpp"

namespace gg {

// Init for biases differs from weights: biases start at zero so a gated
// recurrent cell has zero-state/zero-input as a fixed point.
enum class ParamInit : uint8_t { kUniform, kZero };

struct ParameterBlock {
  std::string name;
  Tensor value;
  Tensor grad;     // accumulated batch gradient, zeroed by adam_step
  Tensor adam_m;   // first moment
  Tensor adam_v;   // second moment
  int64_t step = 0;
  int32_t index = -1;  // position within the owning set
  ParamInit init = ParamInit::kUniform;
};

class ParameterSet;

// Per-sample gradient buffer. Workers backward into private stores; the
// caller folds stores into ParameterBlock::grad in sample order, which keeps
// results independent of thread count and scheduling.
class GradStore {
 public:
  explicit GradStore(const ParameterSet& set);
  Tensor& slot(const ParameterBlock& block);
  const Tensor* peek(const ParameterBlock& block) const;
  void clear();

 private:
  friend class ParameterSet;
  std::vector<Tensor> grads_;  // indexed by block index; empty tensor = untouched
};

class ParameterSet {
 public:
  ParameterSet() = default;
  ParameterSet(const ParameterSet&) = delete;
  ParameterSet& operator=(const ParameterSet&) = delete;
  ParameterSet(ParameterSet&&) = default;
  ParameterSet& operator=(ParameterSet&&) = default;

  ParameterBlock& add(const std::string& name, std::vector<int64_t> shape,
                      ParamInit init = ParamInit::kUniform);

  // Uniform in [-range, range] for weight blocks, zero for bias blocks,
  // consumed in registration order from one seeded stream.
  void init(uint64_t seed, double range = 0.08);

  ParameterBlock* find(const std::string& name);
  const ParameterBlock* find(const std::string& name) const;

  size_t block_count() const { return blocks_.size(); }
  ParameterBlock& block(size_t i) { return *blocks_[i]; }
  const ParameterBlock& block(size_t i) const { return *blocks_[i]; }
  int64_t parameter_count() const;

  void zero_grad();
  void accumulate_grad(const GradStore& store, double scale = 1.0);
  double grad_norm() const;

  // Scales gradients so their global L2 norm is at most max_norm.
  void clip_grad_norm(double max_norm);

  // Standard Adam with bias correction; zeroes gradients afterwards.
  // Throws DivergenceError naming the block if a gradient is non-finite.
  void adam_step(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                 double epsilon = 1e-8);

 private:
  std::vector<std::unique_ptr<ParameterBlock>> blocks_;
};

}  // namespace gg
