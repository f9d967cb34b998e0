#pragma once

#include <cstdint>
#include <vector>

#include "gg/params.hpp"
#include "gg/tensor.hpp"

namespace gg {

// Handle to a tensor recorded on a Tape.
struct Var {
  int32_t id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode tape over a fixed primitive set. Forward calls record nodes;
// backward() replays them in reverse recording order exactly once, adding
// parameter-leaf gradients into a GradStore. A Tape is confined to one
// worker; independent tapes may run in parallel.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var param(const ParameterBlock& block);
  Var constant(Tensor value);
  Var zeros(std::vector<int64_t> shape);

  // [m x k] * [k x n] -> [m x n]
  Var matmul(Var a, Var b);
  // [m x k] * [n x k]^T -> [m x n]
  Var matmul_nt(Var a, Var b);
  // [r x c] * [c] -> [r]
  Var matvec(Var m, Var v);
  // [r] * [r x c] -> [c]
  Var vecmat(Var v, Var m);

  Var add(Var a, Var b);        // same shape
  Var mul(Var a, Var b);        // elementwise, same shape
  Var scale(Var a, double c);
  Var add_const(Var a, double c);
  Var add_rowvec(Var m, Var v); // broadcast [c] over rows of [r x c]
  Var concat(Var a, Var b);     // rank-1 concatenation

  Var relu(Var a);
  Var tanh(Var a);
  Var sigmoid(Var a);

  // Rank-1, max-subtracted; outputs positive and summing to 1.
  Var softmax(Var logits);
  // -log(probabilities[true_index]); with softmax probabilities upstream the
  // logit gradient composes to (softmax - one_hot).
  Var cross_entropy(Var probabilities, int64_t true_index);

  Var sum(Var a);  // rank-1 -> scalar
  Var embedding_row(Var matrix, int64_t row);

  const Tensor& value(Var v) const { return node(v).value; }
  double scalar(Var v) const;
  size_t size() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1 and accumulates into `grads`. Deterministic:
  // the same tape backs to bit-identical gradients every time.
  void backward(Var loss, GradStore& grads) const;

 private:
  enum class Op : uint8_t {
    kParam, kConst, kMatmul, kMatmulNT, kMatvec, kVecmat,
    kAdd, kMul, kScale, kAddConst, kAddRowvec, kConcat,
    kRelu, kTanh, kSigmoid, kSoftmax, kCrossEntropy, kSum, kEmbedRow,
  };

  struct Node {
    Op op;
    int32_t a = -1;
    int32_t b = -1;
    int64_t index = 0;  // class index / embedding row
    double c = 0.0;     // scalar operand
    const ParameterBlock* block = nullptr;
    Tensor value;
  };

  const Node& node(Var v) const;
  Var push(Node node);

  std::vector<Node> nodes_;
};

// weights = softmax(keys . query); returns the weight-blended rows of values.
// query [d], keys [n x d], values [n x d] -> [d].
Var dot_attention(Tape& tape, Var query, Var keys, Var values);

}  // namespace gg
