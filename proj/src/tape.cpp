#include "gg/tape.hpp"

#include <algorithm>
#include <cmath>

#include "gg/error.hpp"

namespace gg {

namespace {
void require(bool cond, const std::string& msg) {
  if (!cond) throw DimensionError(msg);
}
}  // namespace

const Tape::Node& Tape::node(Var v) const {
  if (!v.valid() || static_cast<size_t>(v.id) >= nodes_.size()) {
    throw IndexError("tape: invalid var handle");
  }
  return nodes_[static_cast<size_t>(v.id)];
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{static_cast<int32_t>(nodes_.size() - 1)};
}

Var Tape::param(const ParameterBlock& block) {
  Node n;
  n.op = Op::kParam;
  n.block = &block;
  n.value = block.value;
  return push(std::move(n));
}

Var Tape::constant(Tensor value) {
  Node n;
  n.op = Op::kConst;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::zeros(std::vector<int64_t> shape) {
  return constant(Tensor::zeros(std::move(shape)));
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& x = node(a).value;
  const Tensor& y = node(b).value;
  require(x.rank() == 2 && y.rank() == 2 && x.cols() == y.rows(),
          "matmul: incompatible shapes " + x.shape_str() + " and " + y.shape_str());
  const int64_t m = x.rows(), k = x.cols(), n = y.cols();
  Tensor out = Tensor::zeros({m, n});
  for (int64_t i = 0; i < m; ++i) {
    const double* xi = &x.data[static_cast<size_t>(i * k)];
    double* oi = &out.data[static_cast<size_t>(i * n)];
    for (int64_t kk = 0; kk < k; ++kk) {
      const double xv = xi[kk];
      const double* yk = &y.data[static_cast<size_t>(kk * n)];
      for (int64_t j = 0; j < n; ++j) oi[j] += xv * yk[j];
    }
  }
  Node nd;
  nd.op = Op::kMatmul;
  nd.a = a.id;
  nd.b = b.id;
  nd.value = std::move(out);
  return push(std::move(nd));
}

Var Tape::matmul_nt(Var a, Var b) {
  const Tensor& x = node(a).value;
  const Tensor& y = node(b).value;
  require(x.rank() == 2 && y.rank() == 2 && x.cols() == y.cols(),
          "matmul_nt: incompatible shapes " + x.shape_str() + " and " + y.shape_str());
  const int64_t m = x.rows(), k = x.cols(), n = y.rows();
  Tensor out = Tensor::zeros({m, n});
  for (int64_t i = 0; i < m; ++i) {
    const double* xi = &x.data[static_cast<size_t>(i * k)];
    for (int64_t j = 0; j < n; ++j) {
      const double* yj = &y.data[static_cast<size_t>(j * k)];
      double acc = 0.0;
      for (int64_t kk = 0; kk < k; ++kk) acc += xi[kk] * yj[kk];
      out.at(i, j) = acc;
    }
  }
  Node nd;
  nd.op = Op::kMatmulNT;
  nd.a = a.id;
  nd.b = b.id;
  nd.value = std::move(out);
  return push(std::move(nd));
}

Var Tape::matvec(Var m, Var v) {
  const Tensor& w = node(m).value;
  const Tensor& x = node(v).value;
  require(w.rank() == 2 && x.rank() == 1 && w.cols() == x.size(),
          "matvec: incompatible shapes " + w.shape_str() + " and " + x.shape_str());
  const int64_t r = w.rows(), c = w.cols();
  Tensor out = Tensor::zeros({r});
  for (int64_t i = 0; i < r; ++i) {
    const double* wi = &w.data[static_cast<size_t>(i * c)];
    double acc = 0.0;
    for (int64_t j = 0; j < c; ++j) acc += wi[j] * x[j];
    out[i] = acc;
  }
  Node nd;
  nd.op = Op::kMatvec;
  nd.a = m.id;
  nd.b = v.id;
  nd.value = std::move(out);
  return push(std::move(nd));
}

Var Tape::vecmat(Var v, Var m) {
  const Tensor& x = node(v).value;
  const Tensor& w = node(m).value;
  require(x.rank() == 1 && w.rank() == 2 && w.rows() == x.size(),
          "vecmat: incompatible shapes " + x.shape_str() + " and " + w.shape_str());
  const int64_t r = w.rows(), c = w.cols();
  Tensor out = Tensor::zeros({c});
  for (int64_t i = 0; i < r; ++i) {
    const double xi = x[i];
    const double* wi = &w.data[static_cast<size_t>(i * c)];
    for (int64_t j = 0; j < c; ++j) out[j] += xi * wi[j];
  }
  Node nd;
  nd.op = Op::kVecmat;
  nd.a = v.id;
  nd.b = m.id;
  nd.value = std::move(out);
  return push(std::move(nd));
}

Var Tape::add(Var a, Var b) {
  const Tensor& x = node(a).value;
  const Tensor& y = node(b).value;
  require(x.same_shape(y), "add: shape mismatch " + x.shape_str() + " vs " + y.shape_str());
  Tensor out = x;
  for (int64_t i = 0; i < out.size(); ++i) out[i] += y[i];
  Node nd;
  nd.op = Op::kAdd;
  nd.a = a.id;
  nd.b = b.id;
  nd.value = std::move(out);
  return push(std::move(nd));
}

Var Tape::mul(Var a, Var b) {
  const Tensor& x = node(a).value;
  const Tensor& y = node(b).value;
  require(x.same_shape(y), "mul: shape mismatch " + x.shape_str() + " vs " + y.shape_str());
  Tensor out = x;
  for (int64_t i = 0; i < out.size(); ++i) out[i] *= y[i];
  Node nd;
  nd.op = Op::kMul;
  nd.a = a.id;
  nd.b = b.id;
  nd.value = std::move(out);
  return push(std::move(nd));
}

Var Tape::scale(Var a, double c) {
  Tensor out = node(a).value;
  for (double& v : out.data) v *= c;
  Node nd;
  nd.op = Op::kScale;
  nd.a = a.id;
  nd.c = c;
  nd.value = std::move(out);
  return push(std::move(nd));
}

Var Tape::add_const(Var a, double c) {
  Tensor out = node(a).value;
  for (double& v : out.data) v += c;
  Node nd;
  nd.op = Op::kAddConst;
  nd.a = a.id;
  nd.c = c;
  nd.value = std::move(out);
  return push(std::move(nd));
}

Var Tape::add_rowvec(Var m, Var v) {
  const Tensor& w = node(m).value;
  const Tensor& x = node(v).value;
  require(w.rank() == 2 && x.rank() == 1 && w.cols() == x.size(),
          "add_rowvec: incompatible shapes " + w.shape_str() + " and " + x.shape_str());
  Tensor out = w;
  for (int64_t i = 0; i < w.rows(); ++i) {
    for (int64_t j = 0; j < w.cols(); ++j) out.at(i, j) += x[j];
  }
  Node nd;
  nd.op = Op::kAddRowvec;
  nd.a = m.id;
  nd.b = v.id;
  nd.value = std::move(out);
  return push(std::move(nd));
}

Var Tape::concat(Var a, Var b) {
  const Tensor& x = node(a).value;
  const Tensor& y = node(b).value;
  require(x.rank() == 1 && y.rank() == 1,
          "concat: expected rank-1 inputs, got " + x.shape_str() + " and " + y.shape_str());
  Tensor out = Tensor::zeros({x.size() + y.size()});
  std::copy(x.data.begin(), x.data.end(), out.data.begin());
  std::copy(y.data.begin(), y.data.end(), out.data.begin() + x.data.size());
  Node nd;
  nd.op = Op::kConcat;
  nd.a = a.id;
  nd.b = b.id;
  nd.value = std::move(out);
  return push(std::move(nd));
}

Var Tape::relu(Var a) {
  Tensor out = node(a).value;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  Node nd;
  nd.op = Op::kRelu;
  nd.a = a.id;
  nd.value = std::move(out);
  return push(std::move(nd));
}

Var Tape::tanh(Var a) {
  Tensor out = node(a).value;
  for (double& v : out.data) v = std::tanh(v);
  Node nd;
  nd.op = Op::kTanh;
  nd.a = a.id;
  nd.value = std::move(out);
  return push(std::move(nd));
}

Var Tape::sigmoid(Var a) {
  Tensor out = node(a).value;
  for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
  Node nd;
  nd.op = Op::kSigmoid;
  nd.a = a.id;
  nd.value = std::move(out);
  return push(std::move(nd));
}

Var Tape::softmax(Var logits) {
  const Tensor& x = node(logits).value;
  require(x.rank() == 1 && x.size() >= 1, "softmax: expected a non-empty rank-1 tensor");
  Tensor out = x;
  double mx = out[0];
  for (double v : out.data) mx = std::max(mx, v);
  double total = 0.0;
  for (double& v : out.data) {
    v = std::exp(v - mx);
    total += v;
  }
  for (double& v : out.data) v /= total;
  Node nd;
  nd.op = Op::kSoftmax;
  nd.a = logits.id;
  nd.value = std::move(out);
  return push(std::move(nd));
}

Var Tape::cross_entropy(Var probabilities, int64_t true_index) {
  const Tensor& p = node(probabilities).value;
  require(p.rank() == 1, "cross_entropy: expected a rank-1 tensor");
  if (true_index < 0 || true_index >= p.size()) {
    throw IndexError("cross_entropy: index " + std::to_string(true_index) +
                     " out of range for " + p.shape_str());
  }
  Node nd;
  nd.op = Op::kCrossEntropy;
  nd.a = probabilities.id;
  nd.index = true_index;
  nd.value = Tensor::scalar(-std::log(p[true_index]));
  return push(std::move(nd));
}

Var Tape::sum(Var a) {
  const Tensor& x = node(a).value;
  double total = 0.0;
  for (double v : x.data) total += v;
  Node nd;
  nd.op = Op::kSum;
  nd.a = a.id;
  nd.value = Tensor::scalar(total);
  return push(std::move(nd));
}

Var Tape::embedding_row(Var matrix, int64_t row) {
  const Tensor& m = node(matrix).value;
  require(m.rank() == 2, "embedding_row: expected a rank-2 tensor");
  if (row < 0 || row >= m.rows()) {
    throw IndexError("embedding_row: row " + std::to_string(row) + " out of range for " +
                     m.shape_str());
  }
  Tensor out = Tensor::zeros({m.cols()});
  const double* src = &m.data[static_cast<size_t>(row * m.cols())];
  std::copy(src, src + m.cols(), out.data.begin());
  Node nd;
  nd.op = Op::kEmbedRow;
  nd.a = matrix.id;
  nd.index = row;
  nd.value = std::move(out);
  return push(std::move(nd));
}

double Tape::scalar(Var v) const {
  const Tensor& t = node(v).value;
  if (t.size() != 1) throw DimensionError("scalar() on tensor of shape " + t.shape_str());
  return t[0];
}

void Tape::backward(Var loss, GradStore& grads) const {
  const Tensor& l = node(loss).value;
  if (l.size() != 1) {
    throw DimensionError("backward: loss must be scalar, got " + l.shape_str());
  }
  std::vector<Tensor> g(nodes_.size());
  auto grad_of = [&](int32_t id) -> Tensor& {
    Tensor& t = g[static_cast<size_t>(id)];
    if (t.data.empty()) t = Tensor::zeros(nodes_[static_cast<size_t>(id)].value.shape);
    return t;
  };
  grad_of(loss.id)[0] = 1.0;

  for (int32_t id = loss.id; id >= 0; --id) {
    const Tensor& go = g[static_cast<size_t>(id)];
    if (go.data.empty()) continue;  // node does not feed the loss
    const Node& n = nodes_[static_cast<size_t>(id)];
    switch (n.op) {
      case Op::kParam: {
        Tensor& dst = grads.slot(*n.block);
        for (int64_t i = 0; i < dst.size(); ++i) dst[i] += go[i];
        break;
      }
      case Op::kConst:
        break;
      case Op::kMatmul: {
        const Tensor& x = nodes_[static_cast<size_t>(n.a)].value;
        const Tensor& y = nodes_[static_cast<size_t>(n.b)].value;
        Tensor& gx = grad_of(n.a);
        Tensor& gy = grad_of(n.b);
        const int64_t m = x.rows(), k = x.cols(), c = y.cols();
        for (int64_t i = 0; i < m; ++i) {
          for (int64_t kk = 0; kk < k; ++kk) {
            double acc = 0.0;
            for (int64_t j = 0; j < c; ++j) acc += go.at(i, j) * y.at(kk, j);
            gx.at(i, kk) += acc;
          }
        }
        for (int64_t kk = 0; kk < k; ++kk) {
          for (int64_t j = 0; j < c; ++j) {
            double acc = 0.0;
            for (int64_t i = 0; i < m; ++i) acc += x.at(i, kk) * go.at(i, j);
            gy.at(kk, j) += acc;
          }
        }
        break;
      }
      case Op::kMatmulNT: {
        const Tensor& x = nodes_[static_cast<size_t>(n.a)].value;
        const Tensor& y = nodes_[static_cast<size_t>(n.b)].value;
        Tensor& gx = grad_of(n.a);
        Tensor& gy = grad_of(n.b);
        const int64_t m = x.rows(), k = x.cols(), r = y.rows();
        for (int64_t i = 0; i < m; ++i) {
          for (int64_t j = 0; j < r; ++j) {
            const double gij = go.at(i, j);
            if (gij == 0.0) continue;
            const double* yj = &y.data[static_cast<size_t>(j * k)];
            double* gxi = &gx.data[static_cast<size_t>(i * k)];
            for (int64_t kk = 0; kk < k; ++kk) gxi[kk] += gij * yj[kk];
          }
        }
        for (int64_t j = 0; j < r; ++j) {
          double* gyj = &gy.data[static_cast<size_t>(j * k)];
          for (int64_t i = 0; i < m; ++i) {
            const double gij = go.at(i, j);
            if (gij == 0.0) continue;
            const double* xi = &x.data[static_cast<size_t>(i * k)];
            for (int64_t kk = 0; kk < k; ++kk) gyj[kk] += gij * xi[kk];
          }
        }
        break;
      }
      case Op::kMatvec: {
        const Tensor& w = nodes_[static_cast<size_t>(n.a)].value;
        const Tensor& x = nodes_[static_cast<size_t>(n.b)].value;
        Tensor& gw = grad_of(n.a);
        Tensor& gx = grad_of(n.b);
        const int64_t r = w.rows(), c = w.cols();
        for (int64_t i = 0; i < r; ++i) {
          const double gi = go[i];
          if (gi == 0.0) continue;
          double* gwi = &gw.data[static_cast<size_t>(i * c)];
          const double* wi = &w.data[static_cast<size_t>(i * c)];
          for (int64_t j = 0; j < c; ++j) {
            gwi[j] += gi * x[j];
            gx[j] += gi * wi[j];
          }
        }
        break;
      }
      case Op::kVecmat: {
        const Tensor& x = nodes_[static_cast<size_t>(n.a)].value;
        const Tensor& w = nodes_[static_cast<size_t>(n.b)].value;
        Tensor& gx = grad_of(n.a);
        Tensor& gw = grad_of(n.b);
        const int64_t r = w.rows(), c = w.cols();
        for (int64_t i = 0; i < r; ++i) {
          const double xi = x[i];
          const double* wi = &w.data[static_cast<size_t>(i * c)];
          double* gwi = &gw.data[static_cast<size_t>(i * c)];
          double acc = 0.0;
          for (int64_t j = 0; j < c; ++j) {
            acc += go[j] * wi[j];
            gwi[j] += xi * go[j];
          }
          gx[i] += acc;
        }
        break;
      }
      case Op::kAdd: {
        Tensor& ga = grad_of(n.a);
        Tensor& gb = grad_of(n.b);
        for (int64_t i = 0; i < go.size(); ++i) {
          ga[i] += go[i];
          gb[i] += go[i];
        }
        break;
      }
      case Op::kMul: {
        const Tensor& x = nodes_[static_cast<size_t>(n.a)].value;
        const Tensor& y = nodes_[static_cast<size_t>(n.b)].value;
        Tensor& ga = grad_of(n.a);
        Tensor& gb = grad_of(n.b);
        for (int64_t i = 0; i < go.size(); ++i) {
          ga[i] += go[i] * y[i];
          gb[i] += go[i] * x[i];
        }
        break;
      }
      case Op::kScale: {
        Tensor& ga = grad_of(n.a);
        for (int64_t i = 0; i < go.size(); ++i) ga[i] += n.c * go[i];
        break;
      }
      case Op::kAddConst: {
        Tensor& ga = grad_of(n.a);
        for (int64_t i = 0; i < go.size(); ++i) ga[i] += go[i];
        break;
      }
      case Op::kAddRowvec: {
        Tensor& gm = grad_of(n.a);
        Tensor& gv = grad_of(n.b);
        const int64_t r = go.rows(), c = go.cols();
        for (int64_t i = 0; i < r; ++i) {
          for (int64_t j = 0; j < c; ++j) {
            gm.at(i, j) += go.at(i, j);
            gv[j] += go.at(i, j);
          }
        }
        break;
      }
      case Op::kConcat: {
        Tensor& ga = grad_of(n.a);
        Tensor& gb = grad_of(n.b);
        const int64_t na = ga.size();
        for (int64_t i = 0; i < na; ++i) ga[i] += go[i];
        for (int64_t i = 0; i < gb.size(); ++i) gb[i] += go[na + i];
        break;
      }
      case Op::kRelu: {
        const Tensor& x = nodes_[static_cast<size_t>(n.a)].value;
        Tensor& ga = grad_of(n.a);
        for (int64_t i = 0; i < go.size(); ++i) ga[i] += x[i] > 0.0 ? go[i] : 0.0;
        break;
      }
      case Op::kTanh: {
        Tensor& ga = grad_of(n.a);
        for (int64_t i = 0; i < go.size(); ++i) {
          const double y = n.value[i];
          ga[i] += go[i] * (1.0 - y * y);
        }
        break;
      }
      case Op::kSigmoid: {
        Tensor& ga = grad_of(n.a);
        for (int64_t i = 0; i < go.size(); ++i) {
          const double y = n.value[i];
          ga[i] += go[i] * y * (1.0 - y);
        }
        break;
      }
      case Op::kSoftmax: {
        Tensor& ga = grad_of(n.a);
        double dot = 0.0;
        for (int64_t i = 0; i < go.size(); ++i) dot += go[i] * n.value[i];
        for (int64_t i = 0; i < go.size(); ++i) ga[i] += n.value[i] * (go[i] - dot);
        break;
      }
      case Op::kCrossEntropy: {
        const Tensor& p = nodes_[static_cast<size_t>(n.a)].value;
        Tensor& ga = grad_of(n.a);
        ga[n.index] -= go[0] / p[n.index];
        break;
      }
      case Op::kSum: {
        Tensor& ga = grad_of(n.a);
        for (int64_t i = 0; i < ga.size(); ++i) ga[i] += go[0];
        break;
      }
      case Op::kEmbedRow: {
        Tensor& gm = grad_of(n.a);
        const int64_t c = go.size();
        double* dst = &gm.data[static_cast<size_t>(n.index * c)];
        for (int64_t i = 0; i < c; ++i) dst[i] += go[i];
        break;
      }
    }
  }
}

Var dot_attention(Tape& tape, Var query, Var keys, Var values) {
  const Tensor& q = tape.value(query);
  const Tensor& k = tape.value(keys);
  const Tensor& v = tape.value(values);
  if (q.rank() != 1 || k.rank() != 2 || v.rank() != 2 || k.cols() != q.size() ||
      v.rows() != k.rows()) {
    throw DimensionError("dot_attention: incompatible shapes query " + q.shape_str() +
                         ", keys " + k.shape_str() + ", values " + v.shape_str());
  }
  Var scores = tape.matvec(keys, query);
  Var weights = tape.softmax(scores);
  return tape.vecmat(weights, values);
}

}  // namespace gg
