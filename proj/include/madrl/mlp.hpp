#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace madrl {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Numerically stable softplus, log(1 + e^x).
template <typename Derived>
auto softplus(const Eigen::ArrayBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return x.max(S(0)) + (-x.abs()).exp().log1p();
}

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return S(1) / (S(1) + (-x).exp());
}

/// Column-wise softmax.
template <typename Scalar>
Matrix<Scalar> softmax(const Matrix<Scalar>& logits) {
  Matrix<Scalar> out = logits.rowwise() - logits.colwise().maxCoeff();
  out = out.array().exp().matrix();
  out.array().rowwise() /= out.colwise().sum().array();
  return out;
}

template <typename Scalar>
struct DenseLayer {
  Matrix<Scalar> weight;  // out × in
  Vector<Scalar> bias;

  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.weight == b.weight && a.bias == b.bias;
  }
};

/// Activations kept from a forward pass for backprop.
template <typename Scalar>
struct MlpTape {
  std::vector<Matrix<Scalar>> inputs;  // input to each layer, then the output
  std::vector<Matrix<Scalar>> preactivation;
  Matrix<Scalar> delta;
  Matrix<Scalar> scratch;
};

/// Fully connected network with softplus hidden units and a linear head.
/// Inputs are batched column-wise.
template <typename Scalar>
class Mlp {
 public:
  using Mat = Matrix<Scalar>;
  using Vec = Vector<Scalar>;

  Mlp() = default;

  /// Glorot-uniform hidden layers; the output layer starts at zero.
  template <typename Rng>
  Mlp(const std::vector<int>& widths, Rng& rng) {
    if (widths.size() < 2) throw std::invalid_argument("network needs at least input and output width");
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      const int in = widths[l], out = widths[l + 1];
      DenseLayer<Scalar> layer{Mat::Zero(out, in), Vec::Zero(out)};
      if (l + 2 < widths.size()) {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const double limit = std::sqrt(6.0 / (in + out));
        for (Eigen::Index i = 0; i < layer.weight.size(); ++i)
          layer.weight.data()[i] = static_cast<Scalar>(limit * u(rng));
      }
      layers_.push_back(std::move(layer));
    }
  }

  explicit Mlp(std::vector<DenseLayer<Scalar>> layers) : layers_(std::move(layers)) {}

  int input_size() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols()); }
  int output_size() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows()); }
  std::vector<DenseLayer<Scalar>>& layers() { return layers_; }
  const std::vector<DenseLayer<Scalar>>& layers() const { return layers_; }

  Eigen::Index parameter_count() const {
    Eigen::Index n = 0;
    for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
    return n;
  }

  /// Forward pass over a batch; keeps the activations in `tape` for backprop.
  /// Buffers in the tape are reused across calls with the same batch shape.
  template <typename Derived>
  const Mat& forward(const Eigen::MatrixBase<Derived>& x, MlpTape<Scalar>& tape) const {
    if (x.rows() != input_size()) throw std::invalid_argument("input has wrong dimension");
    const std::size_t depth = layers_.size();
    tape.inputs.resize(depth + 1);
    tape.preactivation.resize(depth);
    tape.inputs[0] = x;
    for (std::size_t l = 0; l < depth; ++l) {
      Mat& z = tape.preactivation[l];
      z.noalias() = layers_[l].weight * tape.inputs[l];
      z.colwise() += layers_[l].bias;
      if (l + 1 < depth)
        tape.inputs[l + 1] = softplus(z.array()).matrix();
      else
        tape.inputs[l + 1] = z;
    }
    return tape.inputs[depth];
  }

  template <typename Derived>
  Mat forward(const Eigen::MatrixBase<Derived>& x) const {
    MlpTape<Scalar> tape;
    return forward(x, tape);
  }

  /// Gradient of a scalar loss given dL/d(output) for the batch in `tape`.
  void backward(MlpTape<Scalar>& tape, const Mat& grad_out, std::vector<DenseLayer<Scalar>>& grads) const {
    grads.resize(layers_.size());
    tape.delta = grad_out;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      grads[l].weight.noalias() = tape.delta * tape.inputs[l].transpose();
      grads[l].bias = tape.delta.rowwise().sum();
      if (l > 0) {
        tape.scratch.noalias() = layers_[l].weight.transpose() * tape.delta;
        tape.scratch.array() *= sigmoid(tape.preactivation[l - 1].array());
        tape.delta.swap(tape.scratch);
      }
    }
  }

  std::vector<DenseLayer<Scalar>> backward(MlpTape<Scalar>& tape, const Mat& grad_out) const {
    std::vector<DenseLayer<Scalar>> grads;
    backward(tape, grad_out, grads);
    return grads;
  }

  /// this += step * grads
  void apply(const std::vector<DenseLayer<Scalar>>& grads, Scalar step) {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      layers_[l].weight.noalias() += step * grads[l].weight;
      layers_[l].bias.noalias() += step * grads[l].bias;
    }
  }

  Vec flat() const { return flatten(layers_); }
  void set_flat(const Vec& v) {
    Eigen::Index k = 0;
    for (auto& l : layers_) {
      for (Eigen::Index i = 0; i < l.weight.size(); ++i) l.weight.data()[i] = v[k++];
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias.data()[i] = v[k++];
    }
  }

  static Vec flatten(const std::vector<DenseLayer<Scalar>>& layers) {
    Eigen::Index n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    Vec v(n);
    Eigen::Index k = 0;
    for (const auto& l : layers) {
      v.segment(k, l.weight.size()) = Eigen::Map<const Vec>(l.weight.data(), l.weight.size());
      k += l.weight.size();
      v.segment(k, l.bias.size()) = l.bias;
      k += l.bias.size();
    }
    return v;
  }

  friend bool operator==(const Mlp& a, const Mlp& b) { return a.layers_ == b.layers_; }

 private:
  std::vector<DenseLayer<Scalar>> layers_;
};

template <typename Scalar>
Scalar squared_norm(const std::vector<DenseLayer<Scalar>>& grads) {
  Scalar s = 0;
  for (const auto& g : grads) s += g.weight.squaredNorm() + g.bias.squaredNorm();
  return s;
}

template <typename Scalar>
bool all_finite(const std::vector<DenseLayer<Scalar>>& grads) {
  for (const auto& g : grads)
    if (!g.weight.allFinite() || !g.bias.allFinite()) return false;
  return true;
}

}  // namespace madrl
