#pragma once

#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hsigan/tensor/adam.hpp"
#include "hsigan/tensor/ops.hpp"

namespace hsigan::tensor {

struct Pass {
  Mode mode = Mode::infer;
  /// Batch-norm layers fold batch statistics into running averages only when set.
  bool track_stats = true;
};

/// One differentiable stage with a forward cache.
///
/// backward() consumes the cache left by the most recent forward() and adds
/// parameter gradients into the layer's accumulators (unless `param_grads` is
/// false, in which case only the input gradient is produced).
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string name() const = 0;
  virtual Shape4 output_shape(const Shape4& in) const = 0;
  virtual Batch<T> forward(const Batch<T>& x, Pass pass) = 0;
  virtual Batch<T> backward(const Batch<T>& grad_out, bool param_grads) = 0;

  virtual std::vector<ParamSlot<T>> parameters() { return {}; }
  /// Every persisted buffer (trainable and running statistics), fixed order.
  virtual std::vector<std::span<T>> state() { return {}; }
  virtual void zero_grad() {}
  /// He-normal weights (std = sqrt(2 / fan_in)), zero biases.
  virtual void initialize(std::mt19937_64& /*rng*/) {}
};

/// Spectral or spatial convolution, forward or transposed.
template <typename T>
class ConvLayer final : public Layer<T> {
 public:
  ConvLayer(ConvGeometry g, bool transposed);

  std::string name() const override;
  Shape4 output_shape(const Shape4& in) const override;
  Batch<T> forward(const Batch<T>& x, Pass pass) override;
  Batch<T> backward(const Batch<T>& grad_out, bool param_grads) override;
  std::vector<ParamSlot<T>> parameters() override;
  std::vector<std::span<T>> state() override;
  void zero_grad() override;
  void initialize(std::mt19937_64& rng) override;

  ConvParams<T>& params() { return params_; }
  const ConvParams<T>& params() const { return params_; }
  const ConvGrads<T>& grads() const { return grads_; }
  bool transposed() const { return transposed_; }

 private:
  ConvParams<T> params_;
  ConvGrads<T> grads_;
  bool transposed_;
  Batch<T> input_;
};

template <typename T>
class BatchNormLayer final : public Layer<T> {
 public:
  explicit BatchNormLayer(std::size_t channels);

  std::string name() const override { return "batchnorm"; }
  Shape4 output_shape(const Shape4& in) const override { return in; }
  Batch<T> forward(const Batch<T>& x, Pass pass) override;
  Batch<T> backward(const Batch<T>& grad_out, bool param_grads) override;
  std::vector<ParamSlot<T>> parameters() override;
  std::vector<std::span<T>> state() override;
  void zero_grad() override;

  BatchNormParams<T>& params() { return params_; }

 private:
  BatchNormParams<T> params_;
  std::vector<T> grad_gamma_;
  std::vector<T> grad_beta_;
  BatchNormCache<T> cache_;
  bool cached_ = false;
};

template <typename T>
class ActivationLayer final : public Layer<T> {
 public:
  explicit ActivationLayer(Activation kind) : kind_(kind) {}

  std::string name() const override;
  Shape4 output_shape(const Shape4& in) const override { return in; }
  Batch<T> forward(const Batch<T>& x, Pass pass) override;
  Batch<T> backward(const Batch<T>& grad_out, bool param_grads) override;

 private:
  Activation kind_;
  Batch<T> input_;
  Batch<T> output_;
};

/// Fully connected layer over the flattened input; output is reshaped to `out_shape`.
template <typename T>
class DenseLayer final : public Layer<T> {
 public:
  DenseLayer(std::size_t inputs, Shape4 out_shape);

  std::string name() const override { return "dense"; }
  Shape4 output_shape(const Shape4& in) const override;
  Batch<T> forward(const Batch<T>& x, Pass pass) override;
  Batch<T> backward(const Batch<T>& grad_out, bool param_grads) override;
  std::vector<ParamSlot<T>> parameters() override;
  std::vector<std::span<T>> state() override;
  void zero_grad() override;
  void initialize(std::mt19937_64& rng) override;

  DenseParams<T>& params() { return params_; }
  const DenseParams<T>& grads() const { return grads_; }

 private:
  DenseParams<T> params_;
  DenseParams<T> grads_;
  Shape4 out_shape_;
  Batch<T> input_;
};

/// Pure reshape; used for the depth merge between spectral and spatial stages.
template <typename T>
class ReshapeLayer final : public Layer<T> {
 public:
  explicit ReshapeLayer(Shape4 target) : target_(target) {}

  std::string name() const override { return "reshape"; }
  Shape4 output_shape(const Shape4& in) const override;
  Batch<T> forward(const Batch<T>& x, Pass pass) override;
  Batch<T> backward(const Batch<T>& grad_out, bool param_grads) override;

 private:
  Shape4 target_;
  Shape4 input_shape_{};
};

/// Keeps bands [offset, offset + count).
template <typename T>
class BandCropLayer final : public Layer<T> {
 public:
  BandCropLayer(std::size_t offset, std::size_t count) : offset_(offset), count_(count) {}

  std::string name() const override { return "band_crop"; }
  Shape4 output_shape(const Shape4& in) const override;
  Batch<T> forward(const Batch<T>& x, Pass pass) override;
  Batch<T> backward(const Batch<T>& grad_out, bool param_grads) override;

 private:
  std::size_t offset_;
  std::size_t count_;
  Shape4 input_shape_{};
};

/// Ordered stack of layers.
template <typename T>
class Network {
 public:
  template <typename L, typename... Args>
  L& add(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  Batch<T> forward(const Batch<T>& x, Pass pass);
  Batch<T> backward(const Batch<T>& grad_out, bool param_grads = true);
  Shape4 output_shape(Shape4 in) const;

  std::vector<ParamSlot<T>> parameters();
  std::vector<std::span<T>> state();
  void zero_grad();
  void initialize(std::mt19937_64& rng);

  std::size_t size() const { return layers_.size(); }
  Layer<T>& layer(std::size_t i) { return *layers_.at(i); }
  const Layer<T>& layer(std::size_t i) const { return *layers_.at(i); }

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

extern template class ConvLayer<float>;
extern template class ConvLayer<double>;
extern template class BatchNormLayer<float>;
extern template class BatchNormLayer<double>;
extern template class ActivationLayer<float>;
extern template class ActivationLayer<double>;
extern template class DenseLayer<float>;
extern template class DenseLayer<double>;
extern template class ReshapeLayer<float>;
extern template class ReshapeLayer<double>;
extern template class BandCropLayer<float>;
extern template class BandCropLayer<double>;
extern template class Network<float>;
extern template class Network<double>;

}  // namespace hsigan::tensor
