#include "hsigan/tensor/layers.hpp"

#include <algorithm>
#include <cmath>

namespace hsigan::tensor {

namespace {

template <typename T>
void he_normal(std::span<T> values, std::size_t fan_in, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
  for (T& v : values) v = static_cast<T>(dist(rng));
}

void require_cache(bool present, const char* layer) {
  if (!present) {
    throw ContractError(std::string(layer) + " backward called without a cached forward pass");
  }
}

}  // namespace

// ConvLayer -----------------------------------------------------------------

template <typename T>
ConvLayer<T>::ConvLayer(ConvGeometry g, bool transposed)
    : params_(g), grads_(g), transposed_(transposed) {}

template <typename T>
std::string ConvLayer<T>::name() const {
  std::string n = params_.geometry.kind == ConvKind::spectral ? "spectral" : "spatial";
  return (transposed_ ? "tconv_" : "conv_") + n;
}

template <typename T>
Shape4 ConvLayer<T>::output_shape(const Shape4& in) const {
  return transposed_ ? tconv_output_shape(params_.geometry, in)
                     : conv_output_shape(params_.geometry, in);
}

template <typename T>
Batch<T> ConvLayer<T>::forward(const Batch<T>& x, Pass) {
  const bool spectral = params_.geometry.kind == ConvKind::spectral;
  Batch<T> out;
  out.reserve(x.size());
  for (const auto& t : x) {
    if (transposed_) {
      out.push_back(spectral ? tconv_spectral(t, params_) : tconv_spatial(t, params_));
    } else {
      out.push_back(spectral ? conv_spectral(t, params_) : conv_spatial(t, params_));
    }
  }
  input_ = x;
  return out;
}

template <typename T>
Batch<T> ConvLayer<T>::backward(const Batch<T>& grad_out, bool param_grads) {
  require_cache(!input_.empty() && input_.size() == grad_out.size(), "convolution");
  ConvGrads<T>* g = param_grads ? &grads_ : nullptr;
  Batch<T> grad_in;
  grad_in.reserve(grad_out.size());
  for (std::size_t n = 0; n < grad_out.size(); ++n) {
    grad_in.push_back(transposed_ ? tconv_backward(input_[n], params_, grad_out[n], g)
                                  : conv_backward(input_[n], params_, grad_out[n], g));
  }
  input_.clear();
  return grad_in;
}

template <typename T>
std::vector<ParamSlot<T>> ConvLayer<T>::parameters() {
  return {{params_.kernel, grads_.kernel}, {params_.bias, grads_.bias}};
}

template <typename T>
std::vector<std::span<T>> ConvLayer<T>::state() {
  return {params_.kernel, params_.bias};
}

template <typename T>
void ConvLayer<T>::zero_grad() {
  std::fill(grads_.kernel.begin(), grads_.kernel.end(), T{0});
  std::fill(grads_.bias.begin(), grads_.bias.end(), T{0});
}

template <typename T>
void ConvLayer<T>::initialize(std::mt19937_64& rng) {
  he_normal<T>(params_.kernel, params_.geometry.taps() * params_.geometry.in_channels, rng);
  std::fill(params_.bias.begin(), params_.bias.end(), T{0});
}

// BatchNormLayer --------------------------------------------------------------

template <typename T>
BatchNormLayer<T>::BatchNormLayer(std::size_t channels)
    : params_(channels), grad_gamma_(channels, T{0}), grad_beta_(channels, T{0}) {}

template <typename T>
Batch<T> BatchNormLayer<T>::forward(const Batch<T>& x, Pass pass) {
  Batch<T> out = batchnorm(x, params_, pass.mode, &cache_, pass.track_stats);
  cached_ = true;
  return out;
}

template <typename T>
Batch<T> BatchNormLayer<T>::backward(const Batch<T>& grad_out, bool param_grads) {
  require_cache(cached_, "batchnorm");
  Batch<T> grad_in = batchnorm_backward(grad_out, params_, cache_,
                                        param_grads ? &grad_gamma_ : nullptr,
                                        param_grads ? &grad_beta_ : nullptr);
  cached_ = false;
  cache_.normalized.clear();
  return grad_in;
}

template <typename T>
std::vector<ParamSlot<T>> BatchNormLayer<T>::parameters() {
  return {{params_.gamma, grad_gamma_}, {params_.beta, grad_beta_}};
}

template <typename T>
std::vector<std::span<T>> BatchNormLayer<T>::state() {
  return {params_.gamma, params_.beta, params_.running_mean, params_.running_var};
}

template <typename T>
void BatchNormLayer<T>::zero_grad() {
  std::fill(grad_gamma_.begin(), grad_gamma_.end(), T{0});
  std::fill(grad_beta_.begin(), grad_beta_.end(), T{0});
}

// ActivationLayer -------------------------------------------------------------

template <typename T>
std::string ActivationLayer<T>::name() const {
  switch (kind_) {
    case Activation::identity: return "identity";
    case Activation::lrelu: return "lrelu";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
  }
  return "activation";
}

template <typename T>
Batch<T> ActivationLayer<T>::forward(const Batch<T>& x, Pass) {
  Batch<T> out;
  out.reserve(x.size());
  for (const auto& t : x) out.push_back(activate(kind_, t));
  input_ = x;
  output_ = out;
  return out;
}

template <typename T>
Batch<T> ActivationLayer<T>::backward(const Batch<T>& grad_out, bool) {
  require_cache(!input_.empty() && input_.size() == grad_out.size(), "activation");
  Batch<T> grad_in;
  grad_in.reserve(grad_out.size());
  for (std::size_t n = 0; n < grad_out.size(); ++n) {
    grad_in.push_back(activate_backward(kind_, input_[n], output_[n], grad_out[n]));
  }
  input_.clear();
  output_.clear();
  return grad_in;
}

// DenseLayer ------------------------------------------------------------------

template <typename T>
DenseLayer<T>::DenseLayer(std::size_t inputs, Shape4 out_shape)
    : params_(inputs, out_shape.size()), grads_(inputs, out_shape.size()), out_shape_(out_shape) {}

template <typename T>
Shape4 DenseLayer<T>::output_shape(const Shape4& in) const {
  if (in.size() != params_.inputs) {
    throw ShapeError("dense layer expects " + std::to_string(params_.inputs) +
                     " inputs, got shape " + to_string(in));
  }
  return out_shape_;
}

template <typename T>
Batch<T> DenseLayer<T>::forward(const Batch<T>& x, Pass) {
  Batch<T> out;
  out.reserve(x.size());
  for (const auto& t : x) {
    out.emplace_back(out_shape_, dense_forward(t.values(), params_));
  }
  input_ = x;
  return out;
}

template <typename T>
Batch<T> DenseLayer<T>::backward(const Batch<T>& grad_out, bool param_grads) {
  require_cache(!input_.empty() && input_.size() == grad_out.size(), "dense");
  Batch<T> grad_in;
  grad_in.reserve(grad_out.size());
  for (std::size_t n = 0; n < grad_out.size(); ++n) {
    const Tensor4<T>& in = input_[n];
    grad_in.emplace_back(in.shape(),
                         dense_backward(in.values(), params_, grad_out[n].values(),
                                        param_grads ? &grads_ : nullptr));
  }
  input_.clear();
  return grad_in;
}

template <typename T>
std::vector<ParamSlot<T>> DenseLayer<T>::parameters() {
  return {{params_.weights, grads_.weights}, {params_.bias, grads_.bias}};
}

template <typename T>
std::vector<std::span<T>> DenseLayer<T>::state() {
  return {params_.weights, params_.bias};
}

template <typename T>
void DenseLayer<T>::zero_grad() {
  std::fill(grads_.weights.begin(), grads_.weights.end(), T{0});
  std::fill(grads_.bias.begin(), grads_.bias.end(), T{0});
}

template <typename T>
void DenseLayer<T>::initialize(std::mt19937_64& rng) {
  he_normal<T>(params_.weights, params_.inputs, rng);
  std::fill(params_.bias.begin(), params_.bias.end(), T{0});
}

// ReshapeLayer / BandCropLayer --------------------------------------------------

template <typename T>
Shape4 ReshapeLayer<T>::output_shape(const Shape4& in) const {
  if (in.size() != target_.size()) {
    throw ShapeError("cannot reshape " + to_string(in) + " to " + to_string(target_));
  }
  return target_;
}

template <typename T>
Batch<T> ReshapeLayer<T>::forward(const Batch<T>& x, Pass) {
  input_shape_ = batch_shape(x);
  output_shape(input_shape_);
  Batch<T> out;
  out.reserve(x.size());
  for (const auto& t : x) out.push_back(t.reshaped(target_));
  return out;
}

template <typename T>
Batch<T> ReshapeLayer<T>::backward(const Batch<T>& grad_out, bool) {
  require_cache(input_shape_.size() != 0, "reshape");
  Batch<T> grad_in;
  grad_in.reserve(grad_out.size());
  for (const auto& g : grad_out) grad_in.push_back(g.reshaped(input_shape_));
  return grad_in;
}

template <typename T>
Shape4 BandCropLayer<T>::output_shape(const Shape4& in) const {
  if (offset_ + count_ > in.bands) throw ShapeError("band crop exceeds input bands");
  return {in.height, in.width, count_, in.channels};
}

template <typename T>
Batch<T> BandCropLayer<T>::forward(const Batch<T>& x, Pass) {
  input_shape_ = batch_shape(x);
  Batch<T> out;
  out.reserve(x.size());
  for (const auto& t : x) out.push_back(band_crop(t, offset_, count_));
  return out;
}

template <typename T>
Batch<T> BandCropLayer<T>::backward(const Batch<T>& grad_out, bool) {
  require_cache(input_shape_.size() != 0, "band crop");
  Batch<T> grad_in;
  grad_in.reserve(grad_out.size());
  for (const auto& g : grad_out) grad_in.push_back(band_crop_backward(g, input_shape_, offset_));
  return grad_in;
}

// Network ---------------------------------------------------------------------

template <typename T>
Batch<T> Network<T>::forward(const Batch<T>& x, Pass pass) {
  Batch<T> h = x;
  for (auto& layer : layers_) h = layer->forward(h, pass);
  return h;
}

template <typename T>
Batch<T> Network<T>::backward(const Batch<T>& grad_out, bool param_grads) {
  Batch<T> g = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    g = (*it)->backward(g, param_grads);
  }
  return g;
}

template <typename T>
Shape4 Network<T>::output_shape(Shape4 in) const {
  for (const auto& layer : layers_) in = layer->output_shape(in);
  return in;
}

template <typename T>
std::vector<ParamSlot<T>> Network<T>::parameters() {
  std::vector<ParamSlot<T>> all;
  for (auto& layer : layers_) {
    auto p = layer->parameters();
    all.insert(all.end(), p.begin(), p.end());
  }
  return all;
}

template <typename T>
std::vector<std::span<T>> Network<T>::state() {
  std::vector<std::span<T>> all;
  for (auto& layer : layers_) {
    auto s = layer->state();
    all.insert(all.end(), s.begin(), s.end());
  }
  return all;
}

template <typename T>
void Network<T>::zero_grad() {
  for (auto& layer : layers_) layer->zero_grad();
}

template <typename T>
void Network<T>::initialize(std::mt19937_64& rng) {
  for (auto& layer : layers_) layer->initialize(rng);
}

template class ConvLayer<float>;
template class ConvLayer<double>;
template class BatchNormLayer<float>;
template class BatchNormLayer<double>;
template class ActivationLayer<float>;
template class ActivationLayer<double>;
template class DenseLayer<float>;
template class DenseLayer<double>;
template class ReshapeLayer<float>;
template class ReshapeLayer<double>;
template class BandCropLayer<float>;
template class BandCropLayer<double>;
template class Network<float>;
template class Network<double>;

}  // namespace hsigan::tensor
