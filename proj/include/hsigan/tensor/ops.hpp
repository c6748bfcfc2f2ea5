#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hsigan/tensor/tensor.hpp"

namespace hsigan::tensor {

enum class Mode { train, infer };

enum class ConvKind {
  spectral,  ///< 1×1×k_b kernel sliding along the band axis
  spatial,   ///< k×k kernel over rows/cols at full (depth-merged) channel depth
};

/// Static shape of a convolution or transposed convolution.
///
/// For a forward convolution the kernel is laid out (ky, kx, kb, in, out).
/// For a transposed convolution it is laid out (ky, kx, kb, out, in), so the
/// same kernel buffer serves a convolution c→d and its adjoint d→c.
struct ConvGeometry {
  ConvKind kind = ConvKind::spectral;
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_spatial = 1;
  std::size_t kernel_bands = 1;
  std::size_t stride_spatial = 1;
  std::size_t stride_spectral = 1;
  std::size_t pad_spatial = 0;
  std::size_t pad_spectral = 0;

  static ConvGeometry spectral(std::size_t in, std::size_t out, std::size_t kernel_bands,
                               std::size_t stride = 1, std::size_t pad = 0);
  static ConvGeometry spatial(std::size_t in, std::size_t out, std::size_t kernel,
                              std::size_t stride = 1, std::size_t pad = 0);

  std::size_t taps() const { return kernel_spatial * kernel_spatial * kernel_bands; }
  std::size_t kernel_count() const { return taps() * in_channels * out_channels; }
  friend bool operator==(const ConvGeometry&, const ConvGeometry&) = default;
};

/// Kernel and bias of one convolutional or transposed-convolutional layer.
template <typename T>
struct ConvParams {
  ConvGeometry geometry;
  std::vector<T> kernel;
  std::vector<T> bias;

  explicit ConvParams(ConvGeometry g = {})
      : geometry(g), kernel(g.kernel_count(), T{0}), bias(g.out_channels, T{0}) {}
};

template <typename T>
struct ConvGrads {
  std::vector<T> kernel;
  std::vector<T> bias;

  explicit ConvGrads(const ConvGeometry& g = {})
      : kernel(g.kernel_count(), T{0}), bias(g.out_channels, T{0}) {}
};

Shape4 conv_output_shape(const ConvGeometry& g, const Shape4& in);
Shape4 tconv_output_shape(const ConvGeometry& g, const Shape4& in);

// Forward convolutions. conv_spectral/conv_spatial check the layer kind and
// the depth-merge contract before delegating to the shared 3-D kernel loop.
template <typename T>
Tensor4<T> conv_spectral(const Tensor4<T>& x, const ConvParams<T>& p);
template <typename T>
Tensor4<T> conv_spatial(const Tensor4<T>& x, const ConvParams<T>& p);
template <typename T>
Tensor4<T> conv_forward(const Tensor4<T>& x, const ConvParams<T>& p);

template <typename T>
Tensor4<T> tconv_spectral(const Tensor4<T>& z, const ConvParams<T>& p);
template <typename T>
Tensor4<T> tconv_spatial(const Tensor4<T>& z, const ConvParams<T>& p);
template <typename T>
Tensor4<T> tconv_forward(const Tensor4<T>& z, const ConvParams<T>& p);

/// Returns dL/dx; adds dL/dkernel, dL/dbias into `grads` when non-null.
template <typename T>
Tensor4<T> conv_backward(const Tensor4<T>& x, const ConvParams<T>& p, const Tensor4<T>& grad_out,
                         ConvGrads<T>* grads);
template <typename T>
Tensor4<T> tconv_backward(const Tensor4<T>& z, const ConvParams<T>& p, const Tensor4<T>& grad_out,
                          ConvGrads<T>* grads);

// Activations.

enum class Activation { identity, lrelu, relu, tanh };

inline constexpr double kLeakySlope = 0.2;

template <typename T>
Tensor4<T> activate(Activation kind, const Tensor4<T>& x);

/// `x` is the activation input, `y` its output.
template <typename T>
Tensor4<T> activate_backward(Activation kind, const Tensor4<T>& x, const Tensor4<T>& y,
                             const Tensor4<T>& grad_out);

// Batch normalization, per channel over batch × height × width × bands.

inline constexpr double kBatchNormEpsilon = 1e-5;
inline constexpr double kBatchNormMomentum = 0.9;

template <typename T>
struct BatchNormParams {
  std::vector<T> gamma;
  std::vector<T> beta;
  std::vector<T> running_mean;
  std::vector<T> running_var;

  explicit BatchNormParams(std::size_t channels = 0)
      : gamma(channels, T{1}), beta(channels, T{0}), running_mean(channels, T{0}),
        running_var(channels, T{1}) {}

  std::size_t channels() const { return gamma.size(); }
};

template <typename T>
struct BatchNormCache {
  Mode mode = Mode::infer;
  std::vector<double> inv_std;
  Batch<T> normalized;  // x̂, before gamma/beta
};

/// Train mode normalizes with batch statistics (needs ≥ 2 samples) and, when
/// `update_running` is set, folds them into the running averages.
template <typename T>
Batch<T> batchnorm(const Batch<T>& x, BatchNormParams<T>& p, Mode mode,
                   BatchNormCache<T>* cache = nullptr, bool update_running = true);

template <typename T>
Batch<T> batchnorm_backward(const Batch<T>& grad_out, const BatchNormParams<T>& p,
                            const BatchNormCache<T>& cache, std::vector<T>* grad_gamma,
                            std::vector<T>* grad_beta);

// Fully connected layer. Weights are laid out (inputs, outputs).

template <typename T>
struct DenseParams {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<T> weights;
  std::vector<T> bias;

  DenseParams() = default;
  DenseParams(std::size_t in, std::size_t out)
      : inputs(in), outputs(out), weights(in * out, T{0}), bias(out, T{0}) {}
};

template <typename T>
std::vector<T> dense_forward(std::span<const T> x, const DenseParams<T>& p);

/// Returns dL/dx; accumulates weight/bias gradients into `grads` when non-null.
template <typename T>
std::vector<T> dense_backward(std::span<const T> x, const DenseParams<T>& p,
                              std::span<const T> grad_out, DenseParams<T>* grads);

/// Max-shifted softmax evaluated in double precision.
template <typename T>
std::vector<double> softmax(std::span<const T> logits);

template <typename T>
std::vector<double> dense_softmax(std::span<const T> x, const DenseParams<T>& p);

// Reshapes and crops.

/// (h, w, b, c) -> (h, w, 1, b·c).
template <typename T>
Tensor4<T> depth_merge(const Tensor4<T>& x);

/// (h, w, 1, b·c) -> (h, w, b, c).
template <typename T>
Tensor4<T> depth_unmerge(const Tensor4<T>& x, std::size_t bands);

template <typename T>
Tensor4<T> band_crop(const Tensor4<T>& x, std::size_t offset, std::size_t count);

/// Scatter a cropped gradient back into a zero tensor of the uncropped shape.
template <typename T>
Tensor4<T> band_crop_backward(const Tensor4<T>& grad_out, const Shape4& input_shape,
                              std::size_t offset);

}  // namespace hsigan::tensor
