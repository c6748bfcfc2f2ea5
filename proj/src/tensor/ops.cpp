#include "hsigan/tensor/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hsigan::tensor {

std::string to_string(const Shape4& s) {
  return "(" + std::to_string(s.height) + "x" + std::to_string(s.width) + "x" +
         std::to_string(s.bands) + "x" + std::to_string(s.channels) + ")";
}

ConvGeometry ConvGeometry::spectral(std::size_t in, std::size_t out, std::size_t kernel_bands,
                                    std::size_t stride, std::size_t pad) {
  ConvGeometry g;
  g.kind = ConvKind::spectral;
  g.in_channels = in;
  g.out_channels = out;
  g.kernel_spatial = 1;
  g.kernel_bands = kernel_bands;
  g.stride_spectral = stride;
  g.pad_spectral = pad;
  return g;
}

ConvGeometry ConvGeometry::spatial(std::size_t in, std::size_t out, std::size_t kernel,
                                   std::size_t stride, std::size_t pad) {
  ConvGeometry g;
  g.kind = ConvKind::spatial;
  g.in_channels = in;
  g.out_channels = out;
  g.kernel_spatial = kernel;
  g.kernel_bands = 1;
  g.stride_spatial = stride;
  g.pad_spatial = pad;
  return g;
}

namespace {

std::size_t conv_extent(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad,
                        const char* axis) {
  if (stride == 0) throw ShapeError(std::string("zero stride along ") + axis);
  if (in + 2 * pad < k) {
    throw ShapeError(std::string("kernel extent ") + std::to_string(k) +
                     " exceeds padded input extent " + std::to_string(in + 2 * pad) + " along " +
                     axis);
  }
  return (in + 2 * pad - k) / stride + 1;
}

std::size_t tconv_extent(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad,
                         const char* axis) {
  const long long out = (static_cast<long long>(in) - 1) * static_cast<long long>(stride) +
                        static_cast<long long>(k) - 2 * static_cast<long long>(pad);
  if (in == 0 || out <= 0) {
    throw ShapeError(std::string("non-positive transposed output extent along ") + axis);
  }
  return static_cast<std::size_t>(out);
}

void check_channels(const Shape4& in, std::size_t expected) {
  if (in.channels != expected) {
    throw ShapeError("input has " + std::to_string(in.channels) + " channels, layer expects " +
                     std::to_string(expected) + " along channels");
  }
}

template <typename T>
void check_params(const ConvParams<T>& p) {
  if (p.kernel.size() != p.geometry.kernel_count() || p.bias.size() != p.geometry.out_channels) {
    throw ShapeError("convolution parameter buffers do not match their geometry");
  }
}

void check_kind(const ConvGeometry& g, ConvKind kind, const Shape4& in) {
  if (g.kind != kind) throw ContractError("layer kind does not match the requested convolution");
  if (kind == ConvKind::spectral && g.kernel_spatial != 1) {
    throw ContractError("spectral kernels must have 1x1 spatial extent");
  }
  if (kind == ConvKind::spatial) {
    if (g.kernel_bands != 1) throw ContractError("spatial kernels must span a single band slot");
    if (in.bands != 1) {
      throw ContractError("spatial convolution expects a depth-merged input (bands == 1), got " +
                          to_string(in));
    }
  }
}

// Index of the first kernel element of tap (ky, kx, kb).
inline std::size_t tap_offset(const ConvGeometry& g, std::size_t ky, std::size_t kx,
                              std::size_t kb) {
  return ((ky * g.kernel_spatial + kx) * g.kernel_bands + kb) * g.in_channels * g.out_channels;
}

// Input coordinate hit by output coordinate `o` through kernel tap `k`, or -1 when it
// lands in the zero padding.
inline long source_index(std::size_t o, std::size_t k, std::size_t stride, std::size_t pad,
                         std::size_t extent) {
  const long i = static_cast<long>(o * stride + k) - static_cast<long>(pad);
  return (i < 0 || i >= static_cast<long>(extent)) ? -1 : i;
}

}  // namespace

Shape4 conv_output_shape(const ConvGeometry& g, const Shape4& in) {
  check_channels(in, g.in_channels);
  return {conv_extent(in.height, g.kernel_spatial, g.stride_spatial, g.pad_spatial, "height"),
          conv_extent(in.width, g.kernel_spatial, g.stride_spatial, g.pad_spatial, "width"),
          conv_extent(in.bands, g.kernel_bands, g.stride_spectral, g.pad_spectral, "bands"),
          g.out_channels};
}

Shape4 tconv_output_shape(const ConvGeometry& g, const Shape4& in) {
  check_channels(in, g.in_channels);
  return {tconv_extent(in.height, g.kernel_spatial, g.stride_spatial, g.pad_spatial, "height"),
          tconv_extent(in.width, g.kernel_spatial, g.stride_spatial, g.pad_spatial, "width"),
          tconv_extent(in.bands, g.kernel_bands, g.stride_spectral, g.pad_spectral, "bands"),
          g.out_channels};
}

template <typename T>
Tensor4<T> conv_forward(const Tensor4<T>& x, const ConvParams<T>& p) {
  check_params(p);
  const ConvGeometry& g = p.geometry;
  const Shape4 in = x.shape();
  const Shape4 os = conv_output_shape(g, in);
  Tensor4<T> out(os);
  const std::size_t ic_n = g.in_channels;
  const std::size_t oc_n = g.out_channels;

  for (std::size_t oy = 0; oy < os.height; ++oy) {
    for (std::size_t ox = 0; ox < os.width; ++ox) {
      for (std::size_t ob = 0; ob < os.bands; ++ob) {
        T* o = &out(oy, ox, ob, 0);
        std::copy(p.bias.begin(), p.bias.end(), o);
        for (std::size_t ky = 0; ky < g.kernel_spatial; ++ky) {
          const long iy = source_index(oy, ky, g.stride_spatial, g.pad_spatial, in.height);
          if (iy < 0) continue;
          for (std::size_t kx = 0; kx < g.kernel_spatial; ++kx) {
            const long ix = source_index(ox, kx, g.stride_spatial, g.pad_spatial, in.width);
            if (ix < 0) continue;
            for (std::size_t kb = 0; kb < g.kernel_bands; ++kb) {
              const long ib = source_index(ob, kb, g.stride_spectral, g.pad_spectral, in.bands);
              if (ib < 0) continue;
              const T* xi = &x(iy, ix, ib, 0);
              const T* w = p.kernel.data() + tap_offset(g, ky, kx, kb);
              for (std::size_t ic = 0; ic < ic_n; ++ic) {
                const T xv = xi[ic];
                const T* wr = w + ic * oc_n;
                for (std::size_t oc = 0; oc < oc_n; ++oc) o[oc] += xv * wr[oc];
              }
            }
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor4<T> conv_backward(const Tensor4<T>& x, const ConvParams<T>& p, const Tensor4<T>& grad_out,
                         ConvGrads<T>* grads) {
  check_params(p);
  const ConvGeometry& g = p.geometry;
  const Shape4 in = x.shape();
  const Shape4 os = conv_output_shape(g, in);
  if (grad_out.shape() != os) throw ShapeError("conv upstream gradient shape mismatch");
  Tensor4<T> grad_in(in);
  const std::size_t ic_n = g.in_channels;
  const std::size_t oc_n = g.out_channels;

  for (std::size_t oy = 0; oy < os.height; ++oy) {
    for (std::size_t ox = 0; ox < os.width; ++ox) {
      for (std::size_t ob = 0; ob < os.bands; ++ob) {
        const T* go = &grad_out(oy, ox, ob, 0);
        if (grads) {
          for (std::size_t oc = 0; oc < oc_n; ++oc) grads->bias[oc] += go[oc];
        }
        for (std::size_t ky = 0; ky < g.kernel_spatial; ++ky) {
          const long iy = source_index(oy, ky, g.stride_spatial, g.pad_spatial, in.height);
          if (iy < 0) continue;
          for (std::size_t kx = 0; kx < g.kernel_spatial; ++kx) {
            const long ix = source_index(ox, kx, g.stride_spatial, g.pad_spatial, in.width);
            if (ix < 0) continue;
            for (std::size_t kb = 0; kb < g.kernel_bands; ++kb) {
              const long ib = source_index(ob, kb, g.stride_spectral, g.pad_spectral, in.bands);
              if (ib < 0) continue;
              const std::size_t tap = tap_offset(g, ky, kx, kb);
              const T* xi = &x(iy, ix, ib, 0);
              T* gi = &grad_in(iy, ix, ib, 0);
              const T* w = p.kernel.data() + tap;
              for (std::size_t ic = 0; ic < ic_n; ++ic) {
                const T* wr = w + ic * oc_n;
                T acc{0};
                for (std::size_t oc = 0; oc < oc_n; ++oc) acc += wr[oc] * go[oc];
                gi[ic] += acc;
              }
              if (grads) {
                T* gw = grads->kernel.data() + tap;
                for (std::size_t ic = 0; ic < ic_n; ++ic) {
                  const T xv = xi[ic];
                  T* gwr = gw + ic * oc_n;
                  for (std::size_t oc = 0; oc < oc_n; ++oc) gwr[oc] += xv * go[oc];
                }
              }
            }
          }
        }
      }
    }
  }
  return grad_in;
}

template <typename T>
Tensor4<T> tconv_forward(const Tensor4<T>& z, const ConvParams<T>& p) {
  check_params(p);
  const ConvGeometry& g = p.geometry;
  const Shape4 in = z.shape();
  const Shape4 os = tconv_output_shape(g, in);
  Tensor4<T> out(os);
  const std::size_t ic_n = g.in_channels;
  const std::size_t oc_n = g.out_channels;

  for (std::size_t iy = 0; iy < in.height; ++iy) {
    for (std::size_t ix = 0; ix < in.width; ++ix) {
      for (std::size_t ib = 0; ib < in.bands; ++ib) {
        const T* zi = &z(iy, ix, ib, 0);
        for (std::size_t ky = 0; ky < g.kernel_spatial; ++ky) {
          const long oy = source_index(iy, ky, g.stride_spatial, g.pad_spatial, os.height);
          if (oy < 0) continue;
          for (std::size_t kx = 0; kx < g.kernel_spatial; ++kx) {
            const long ox = source_index(ix, kx, g.stride_spatial, g.pad_spatial, os.width);
            if (ox < 0) continue;
            for (std::size_t kb = 0; kb < g.kernel_bands; ++kb) {
              const long ob = source_index(ib, kb, g.stride_spectral, g.pad_spectral, os.bands);
              if (ob < 0) continue;
              T* o = &out(oy, ox, ob, 0);
              const T* w = p.kernel.data() + tap_offset(g, ky, kx, kb);
              for (std::size_t oc = 0; oc < oc_n; ++oc) {
                const T* wr = w + oc * ic_n;
                T acc{0};
                for (std::size_t ic = 0; ic < ic_n; ++ic) acc += wr[ic] * zi[ic];
                o[oc] += acc;
              }
            }
          }
        }
      }
    }
  }
  T* o = out.data();
  for (std::size_t i = 0; i < out.size(); i += oc_n) {
    for (std::size_t oc = 0; oc < oc_n; ++oc) o[i + oc] += p.bias[oc];
  }
  return out;
}

template <typename T>
Tensor4<T> tconv_backward(const Tensor4<T>& z, const ConvParams<T>& p, const Tensor4<T>& grad_out,
                          ConvGrads<T>* grads) {
  check_params(p);
  const ConvGeometry& g = p.geometry;
  const Shape4 in = z.shape();
  const Shape4 os = tconv_output_shape(g, in);
  if (grad_out.shape() != os) throw ShapeError("transposed conv upstream gradient shape mismatch");
  Tensor4<T> grad_in(in);
  const std::size_t ic_n = g.in_channels;
  const std::size_t oc_n = g.out_channels;

  if (grads) {
    const T* go = grad_out.data();
    for (std::size_t i = 0; i < grad_out.size(); i += oc_n) {
      for (std::size_t oc = 0; oc < oc_n; ++oc) grads->bias[oc] += go[i + oc];
    }
  }
  for (std::size_t iy = 0; iy < in.height; ++iy) {
    for (std::size_t ix = 0; ix < in.width; ++ix) {
      for (std::size_t ib = 0; ib < in.bands; ++ib) {
        const T* zi = &z(iy, ix, ib, 0);
        T* gi = &grad_in(iy, ix, ib, 0);
        for (std::size_t ky = 0; ky < g.kernel_spatial; ++ky) {
          const long oy = source_index(iy, ky, g.stride_spatial, g.pad_spatial, os.height);
          if (oy < 0) continue;
          for (std::size_t kx = 0; kx < g.kernel_spatial; ++kx) {
            const long ox = source_index(ix, kx, g.stride_spatial, g.pad_spatial, os.width);
            if (ox < 0) continue;
            for (std::size_t kb = 0; kb < g.kernel_bands; ++kb) {
              const long ob = source_index(ib, kb, g.stride_spectral, g.pad_spectral, os.bands);
              if (ob < 0) continue;
              const T* go = &grad_out(oy, ox, ob, 0);
              const std::size_t tap = tap_offset(g, ky, kx, kb);
              const T* w = p.kernel.data() + tap;
              for (std::size_t oc = 0; oc < oc_n; ++oc) {
                const T gv = go[oc];
                const T* wr = w + oc * ic_n;
                for (std::size_t ic = 0; ic < ic_n; ++ic) gi[ic] += wr[ic] * gv;
              }
              if (grads) {
                T* gw = grads->kernel.data() + tap;
                for (std::size_t oc = 0; oc < oc_n; ++oc) {
                  const T gv = go[oc];
                  T* gwr = gw + oc * ic_n;
                  for (std::size_t ic = 0; ic < ic_n; ++ic) gwr[ic] += gv * zi[ic];
                }
              }
            }
          }
        }
      }
    }
  }
  return grad_in;
}

template <typename T>
Tensor4<T> conv_spectral(const Tensor4<T>& x, const ConvParams<T>& p) {
  check_kind(p.geometry, ConvKind::spectral, x.shape());
  return conv_forward(x, p);
}

template <typename T>
Tensor4<T> conv_spatial(const Tensor4<T>& x, const ConvParams<T>& p) {
  check_kind(p.geometry, ConvKind::spatial, x.shape());
  return conv_forward(x, p);
}

template <typename T>
Tensor4<T> tconv_spectral(const Tensor4<T>& z, const ConvParams<T>& p) {
  check_kind(p.geometry, ConvKind::spectral, z.shape());
  return tconv_forward(z, p);
}

template <typename T>
Tensor4<T> tconv_spatial(const Tensor4<T>& z, const ConvParams<T>& p) {
  check_kind(p.geometry, ConvKind::spatial, z.shape());
  return tconv_forward(z, p);
}

// ---------------------------------------------------------------------------

template <typename T>
Tensor4<T> activate(Activation kind, const Tensor4<T>& x) {
  Tensor4<T> y(x.shape());
  const T* in = x.data();
  T* out = y.data();
  const T slope = static_cast<T>(kLeakySlope);
  switch (kind) {
    case Activation::identity:
      std::copy(in, in + x.size(), out);
      break;
    case Activation::lrelu:
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = in[i] > T{0} ? in[i] : slope * in[i];
      break;
    case Activation::relu:
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = in[i] > T{0} ? in[i] : T{0};
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::tanh(in[i]);
      break;
  }
  return y;
}

template <typename T>
Tensor4<T> activate_backward(Activation kind, const Tensor4<T>& x, const Tensor4<T>& y,
                             const Tensor4<T>& grad_out) {
  if (grad_out.shape() != x.shape()) throw ShapeError("activation gradient shape mismatch");
  Tensor4<T> gx(x.shape());
  const T* in = x.data();
  const T* out = y.data();
  const T* g = grad_out.data();
  T* d = gx.data();
  const T slope = static_cast<T>(kLeakySlope);
  switch (kind) {
    case Activation::identity:
      std::copy(g, g + x.size(), d);
      break;
    case Activation::lrelu:
      for (std::size_t i = 0; i < x.size(); ++i) d[i] = in[i] > T{0} ? g[i] : slope * g[i];
      break;
    case Activation::relu:
      for (std::size_t i = 0; i < x.size(); ++i) d[i] = in[i] > T{0} ? g[i] : T{0};
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < x.size(); ++i) d[i] = (T{1} - out[i] * out[i]) * g[i];
      break;
  }
  return gx;
}

// ---------------------------------------------------------------------------

template <typename T>
Batch<T> batchnorm(const Batch<T>& x, BatchNormParams<T>& p, Mode mode, BatchNormCache<T>* cache,
                   bool update_running) {
  const Shape4 s = batch_shape(x);
  const std::size_t channels = s.channels;
  if (p.channels() != channels) throw ShapeError("batchnorm channel count mismatch");
  if (mode == Mode::train && x.size() < 2) {
    throw ContractError("batchnorm in train mode needs a batch of at least 2 samples");
  }
  const std::size_t per_sample = s.size() / channels;
  const double count = static_cast<double>(per_sample * x.size());

  std::vector<double> mean(channels, 0.0);
  std::vector<double> inv_std(channels, 0.0);
  if (mode == Mode::train) {
    std::vector<double> var(channels, 0.0);
    for (const auto& t : x) {
      const T* d = t.data();
      for (std::size_t i = 0; i < per_sample; ++i) {
        for (std::size_t c = 0; c < channels; ++c) mean[c] += d[i * channels + c];
      }
    }
    for (auto& m : mean) m /= count;
    for (const auto& t : x) {
      const T* d = t.data();
      for (std::size_t i = 0; i < per_sample; ++i) {
        for (std::size_t c = 0; c < channels; ++c) {
          const double dv = d[i * channels + c] - mean[c];
          var[c] += dv * dv;
        }
      }
    }
    for (std::size_t c = 0; c < channels; ++c) {
      var[c] /= count;
      inv_std[c] = 1.0 / std::sqrt(var[c] + kBatchNormEpsilon);
      if (update_running) {
        const double unbiased = count > 1 ? var[c] * count / (count - 1) : var[c];
        p.running_mean[c] = static_cast<T>(kBatchNormMomentum * p.running_mean[c] +
                                           (1 - kBatchNormMomentum) * mean[c]);
        p.running_var[c] = static_cast<T>(kBatchNormMomentum * p.running_var[c] +
                                          (1 - kBatchNormMomentum) * unbiased);
      }
    }
  } else {
    for (std::size_t c = 0; c < channels; ++c) {
      mean[c] = p.running_mean[c];
      inv_std[c] = 1.0 / std::sqrt(static_cast<double>(p.running_var[c]) + kBatchNormEpsilon);
    }
  }

  Batch<T> out;
  out.reserve(x.size());
  Batch<T> normalized;
  if (cache) normalized.reserve(x.size());
  for (const auto& t : x) {
    Tensor4<T> xhat(s);
    Tensor4<T> y(s);
    const T* d = t.data();
    T* nh = xhat.data();
    T* yo = y.data();
    for (std::size_t i = 0; i < per_sample; ++i) {
      for (std::size_t c = 0; c < channels; ++c) {
        const std::size_t k = i * channels + c;
        nh[k] = static_cast<T>((d[k] - mean[c]) * inv_std[c]);
        yo[k] = p.gamma[c] * nh[k] + p.beta[c];
      }
    }
    out.push_back(std::move(y));
    if (cache) normalized.push_back(std::move(xhat));
  }
  if (cache) {
    cache->mode = mode;
    cache->inv_std = std::move(inv_std);
    cache->normalized = std::move(normalized);
  }
  return out;
}

template <typename T>
Batch<T> batchnorm_backward(const Batch<T>& grad_out, const BatchNormParams<T>& p,
                            const BatchNormCache<T>& cache, std::vector<T>* grad_gamma,
                            std::vector<T>* grad_beta) {
  if (cache.normalized.size() != grad_out.size()) {
    throw ContractError("batchnorm backward called without a matching forward cache");
  }
  const Shape4 s = batch_shape(grad_out);
  const std::size_t channels = s.channels;
  const std::size_t per_sample = s.size() / channels;
  const double count = static_cast<double>(per_sample * grad_out.size());

  std::vector<double> sum_g(channels, 0.0);
  std::vector<double> sum_gx(channels, 0.0);
  for (std::size_t n = 0; n < grad_out.size(); ++n) {
    const T* g = grad_out[n].data();
    const T* nh = cache.normalized[n].data();
    for (std::size_t i = 0; i < per_sample; ++i) {
      for (std::size_t c = 0; c < channels; ++c) {
        const std::size_t k = i * channels + c;
        sum_g[c] += g[k];
        sum_gx[c] += static_cast<double>(g[k]) * nh[k];
      }
    }
  }
  if (grad_gamma) {
    for (std::size_t c = 0; c < channels; ++c) (*grad_gamma)[c] += static_cast<T>(sum_gx[c]);
  }
  if (grad_beta) {
    for (std::size_t c = 0; c < channels; ++c) (*grad_beta)[c] += static_cast<T>(sum_g[c]);
  }

  Batch<T> grad_in;
  grad_in.reserve(grad_out.size());
  for (std::size_t n = 0; n < grad_out.size(); ++n) {
    Tensor4<T> gx(s);
    const T* g = grad_out[n].data();
    const T* nh = cache.normalized[n].data();
    T* d = gx.data();
    for (std::size_t i = 0; i < per_sample; ++i) {
      for (std::size_t c = 0; c < channels; ++c) {
        const std::size_t k = i * channels + c;
        const double scale = static_cast<double>(p.gamma[c]) * cache.inv_std[c];
        if (cache.mode == Mode::train) {
          // d x = γ/σ · (g − mean(g) − x̂ · mean(g x̂))
          d[k] = static_cast<T>(scale * (g[k] - sum_g[c] / count - nh[k] * sum_gx[c] / count));
        } else {
          d[k] = static_cast<T>(scale * g[k]);
        }
      }
    }
    grad_in.push_back(std::move(gx));
  }
  return grad_in;
}

// ---------------------------------------------------------------------------

template <typename T>
std::vector<T> dense_forward(std::span<const T> x, const DenseParams<T>& p) {
  if (x.size() != p.inputs || p.weights.size() != p.inputs * p.outputs ||
      p.bias.size() != p.outputs) {
    throw ShapeError("dense layer expects " + std::to_string(p.inputs) + " inputs, got " +
                     std::to_string(x.size()));
  }
  std::vector<T> out(p.bias);
  for (std::size_t i = 0; i < p.inputs; ++i) {
    const T xv = x[i];
    const T* wr = p.weights.data() + i * p.outputs;
    for (std::size_t o = 0; o < p.outputs; ++o) out[o] += xv * wr[o];
  }
  return out;
}

template <typename T>
std::vector<T> dense_backward(std::span<const T> x, const DenseParams<T>& p,
                              std::span<const T> grad_out, DenseParams<T>* grads) {
  if (x.size() != p.inputs || grad_out.size() != p.outputs) {
    throw ShapeError("dense backward shape mismatch");
  }
  std::vector<T> gx(p.inputs, T{0});
  for (std::size_t i = 0; i < p.inputs; ++i) {
    const T* wr = p.weights.data() + i * p.outputs;
    T acc{0};
    for (std::size_t o = 0; o < p.outputs; ++o) acc += wr[o] * grad_out[o];
    gx[i] = acc;
  }
  if (grads) {
    for (std::size_t i = 0; i < p.inputs; ++i) {
      const T xv = x[i];
      T* gwr = grads->weights.data() + i * p.outputs;
      for (std::size_t o = 0; o < p.outputs; ++o) gwr[o] += xv * grad_out[o];
    }
    for (std::size_t o = 0; o < p.outputs; ++o) grads->bias[o] += grad_out[o];
  }
  return gx;
}

template <typename T>
std::vector<double> softmax(std::span<const T> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  double peak = static_cast<double>(logits[0]);
  for (const T v : logits) peak = std::max(peak, static_cast<double>(v));
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(static_cast<double>(logits[i]) - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

template <typename T>
std::vector<double> dense_softmax(std::span<const T> x, const DenseParams<T>& p) {
  const std::vector<T> logits = dense_forward(x, p);
  return softmax(std::span<const T>(logits));
}

// ---------------------------------------------------------------------------

template <typename T>
Tensor4<T> depth_merge(const Tensor4<T>& x) {
  const Shape4 s = x.shape();
  return x.reshaped({s.height, s.width, 1, s.bands * s.channels});
}

template <typename T>
Tensor4<T> depth_unmerge(const Tensor4<T>& x, std::size_t bands) {
  const Shape4 s = x.shape();
  if (s.bands != 1 || bands == 0 || s.channels % bands != 0) {
    throw ShapeError("cannot unmerge " + to_string(s) + " into " + std::to_string(bands) +
                     " bands");
  }
  return x.reshaped({s.height, s.width, bands, s.channels / bands});
}

template <typename T>
Tensor4<T> band_crop(const Tensor4<T>& x, std::size_t offset, std::size_t count) {
  const Shape4 s = x.shape();
  if (offset + count > s.bands) {
    throw ShapeError("band crop [" + std::to_string(offset) + ", " +
                     std::to_string(offset + count) + ") exceeds " + std::to_string(s.bands) +
                     " bands");
  }
  Tensor4<T> out({s.height, s.width, count, s.channels});
  for (std::size_t h = 0; h < s.height; ++h) {
    for (std::size_t w = 0; w < s.width; ++w) {
      const T* src = &x(h, w, offset, 0);
      std::copy(src, src + count * s.channels, &out(h, w, 0, 0));
    }
  }
  return out;
}

template <typename T>
Tensor4<T> band_crop_backward(const Tensor4<T>& grad_out, const Shape4& input_shape,
                              std::size_t offset) {
  const Shape4 g = grad_out.shape();
  if (g.height != input_shape.height || g.width != input_shape.width ||
      g.channels != input_shape.channels || offset + g.bands > input_shape.bands) {
    throw ShapeError("band crop gradient does not fit the input shape");
  }
  Tensor4<T> out(input_shape);
  for (std::size_t h = 0; h < g.height; ++h) {
    for (std::size_t w = 0; w < g.width; ++w) {
      const T* src = &grad_out(h, w, 0, 0);
      std::copy(src, src + g.bands * g.channels, &out(h, w, offset, 0));
    }
  }
  return out;
}

#define HSIGAN_INSTANTIATE_OPS(T)                                                               \
  template Tensor4<T> conv_forward(const Tensor4<T>&, const ConvParams<T>&);                    \
  template Tensor4<T> conv_backward(const Tensor4<T>&, const ConvParams<T>&, const Tensor4<T>&, \
                                    ConvGrads<T>*);                                             \
  template Tensor4<T> tconv_forward(const Tensor4<T>&, const ConvParams<T>&);                   \
  template Tensor4<T> tconv_backward(const Tensor4<T>&, const ConvParams<T>&,                   \
                                     const Tensor4<T>&, ConvGrads<T>*);                         \
  template Tensor4<T> conv_spectral(const Tensor4<T>&, const ConvParams<T>&);                   \
  template Tensor4<T> conv_spatial(const Tensor4<T>&, const ConvParams<T>&);                    \
  template Tensor4<T> tconv_spectral(const Tensor4<T>&, const ConvParams<T>&);                  \
  template Tensor4<T> tconv_spatial(const Tensor4<T>&, const ConvParams<T>&);                   \
  template Tensor4<T> activate(Activation, const Tensor4<T>&);                                  \
  template Tensor4<T> activate_backward(Activation, const Tensor4<T>&, const Tensor4<T>&,       \
                                        const Tensor4<T>&);                                     \
  template Batch<T> batchnorm(const Batch<T>&, BatchNormParams<T>&, Mode, BatchNormCache<T>*,   \
                              bool);                                                            \
  template Batch<T> batchnorm_backward(const Batch<T>&, const BatchNormParams<T>&,              \
                                       const BatchNormCache<T>&, std::vector<T>*,               \
                                       std::vector<T>*);                                        \
  template std::vector<T> dense_forward(std::span<const T>, const DenseParams<T>&);             \
  template std::vector<T> dense_backward(std::span<const T>, const DenseParams<T>&,             \
                                         std::span<const T>, DenseParams<T>*);                  \
  template std::vector<double> softmax(std::span<const T>);                                     \
  template std::vector<double> dense_softmax(std::span<const T>, const DenseParams<T>&);        \
  template Tensor4<T> depth_merge(const Tensor4<T>&);                                           \
  template Tensor4<T> depth_unmerge(const Tensor4<T>&, std::size_t);                            \
  template Tensor4<T> band_crop(const Tensor4<T>&, std::size_t, std::size_t);                   \
  template Tensor4<T> band_crop_backward(const Tensor4<T>&, const Shape4&, std::size_t);

HSIGAN_INSTANTIATE_OPS(float)
HSIGAN_INSTANTIATE_OPS(double)

#undef HSIGAN_INSTANTIATE_OPS

}  // namespace hsigan::tensor
