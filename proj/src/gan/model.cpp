#include "hsigan/gan/model.hpp"

#include <charconv>

namespace hsigan::gan {

using tensor::Activation;
using tensor::ActivationLayer;
using tensor::BandCropLayer;
using tensor::Batch;
using tensor::BatchNormLayer;
using tensor::ConvGeometry;
using tensor::ConvLayer;
using tensor::DenseLayer;
using tensor::ReshapeLayer;
using tensor::Shape4;

Architecture Architecture::parse(std::string_view text) {
  const auto plus = text.find('+');
  auto number = [&](std::string_view part) {
    std::size_t v = 0;
    const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || end != part.data() + part.size()) {
      throw ValidationError("architecture must look like \"3+3\", got \"" + std::string(text) +
                            "\"");
    }
    return v;
  };
  if (plus == std::string_view::npos) number({});
  Architecture a{number(text.substr(0, plus)), number(text.substr(plus + 1))};
  if (a.spectral + a.spatial == 0) throw ValidationError("architecture needs at least one layer");
  return a;
}

std::string Architecture::str() const {
  return std::to_string(spectral) + "+" + std::to_string(spatial);
}

void validate(const GanConfig& cfg) {
  if (cfg.n_y < 2) throw ValidationError("n_y must be at least 2");
  if (cfg.w < 3 || cfg.w % 2 == 0) throw ValidationError("cuboid width must be odd and >= 3");
  if (cfg.k == 0) throw ValidationError("kernels per layer must be positive");
  if (cfg.noise_dim == 0) throw ValidationError("noise dimension must be positive");
  if (cfg.bands == 0) throw ValidationError("band count must be positive");
  if (cfg.arch.spectral > 0 && cfg.bands < kSpectralKernel) {
    throw ValidationError("spectral layers need at least " + std::to_string(kSpectralKernel) +
                          " bands");
  }
  if (cfg.arch.spectral + cfg.arch.spatial == 0) {
    throw ValidationError("architecture needs at least one layer");
  }
}

std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

std::size_t generator_seed_bands(std::size_t bands) {
  std::size_t b0 = 1;
  while (4 * b0 + 15 < bands) ++b0;
  return b0;
}

template <typename T>
GanModel<T>::GanModel(const GanConfig& cfg) : cfg_(cfg) {
  validate(cfg);
  const std::size_t k = cfg.k;
  const std::size_t w = cfg.w;

  // Discriminator.
  std::size_t bands = cfg.bands;
  std::size_t channels = 1;
  for (std::size_t i = 0; i < cfg.arch.spectral; ++i) {
    const auto g = i == 0 ? ConvGeometry::spectral(1, k, kSpectralKernel, 2, 0)
                          : ConvGeometry::spectral(k, k, kSpectralKernel, 1, kSpectralKernel / 2);
    auto& conv = disc_.template add<ConvLayer<T>>(g, false);
    bands = conv.output_shape({w, w, bands, channels}).bands;
    channels = k;
    disc_.template add<BatchNormLayer<T>>(k);
    disc_.template add<ActivationLayer<T>>(Activation::lrelu);
  }
  channels *= bands;
  disc_.template add<ReshapeLayer<T>>(Shape4{w, w, 1, channels});
  for (std::size_t i = 0; i < cfg.arch.spatial; ++i) {
    disc_.template add<ConvLayer<T>>(ConvGeometry::spatial(channels, k, 3, 1, 1), false);
    disc_.template add<BatchNormLayer<T>>(k);
    disc_.template add<ActivationLayer<T>>(Activation::lrelu);
    channels = k;
  }
  disc_.template add<DenseLayer<T>>(w * w * channels, Shape4{1, 1, 1, 1 + cfg.n_y});

  // Generator.
  const std::size_t b0 = generator_seed_bands(cfg.bands);
  gen_.template add<DenseLayer<T>>(cfg.noise_dim, Shape4{1, 1, b0, k});
  gen_.template add<BatchNormLayer<T>>(k);
  gen_.template add<ActivationLayer<T>>(Activation::relu);
  const ConvGeometry spectral_up[] = {
      ConvGeometry::spectral(k, k, kSpectralKernel, 2, 0),
      ConvGeometry::spectral(k, k, kSpectralKernel, 2, 0),
      ConvGeometry::spectral(k, k, kSpectralKernel, 1, kSpectralKernel / 2),
  };
  for (const auto& g : spectral_up) {
    gen_.template add<ConvLayer<T>>(g, true);
    gen_.template add<BatchNormLayer<T>>(k);
    gen_.template add<ActivationLayer<T>>(Activation::relu);
  }
  const std::size_t grown = 4 * b0 + 15;
  gen_.template add<BandCropLayer<T>>((grown - cfg.bands) / 2, cfg.bands);
  gen_.template add<ReshapeLayer<T>>(Shape4{1, 1, 1, cfg.bands * k});
  const std::size_t spatial_up = (w - 1) / 2;
  channels = cfg.bands * k;
  for (std::size_t i = 0; i < spatial_up; ++i) {
    const bool last = i + 1 == spatial_up;
    const std::size_t out = last ? cfg.bands : k;
    gen_.template add<ConvLayer<T>>(ConvGeometry::spatial(channels, out, 3, 1, 0), true);
    gen_.template add<BatchNormLayer<T>>(out);
    gen_.template add<ActivationLayer<T>>(last ? Activation::tanh : Activation::relu);
    channels = out;
  }
  gen_.template add<ReshapeLayer<T>>(Shape4{w, w, cfg.bands, 1});

  if (disc_.output_shape(cuboid_shape()) != Shape4{1, 1, 1, outputs()} ||
      gen_.output_shape(noise_shape()) != cuboid_shape()) {
    throw ContractError("network topology does not close for this configuration");
  }
}

template <typename T>
void GanModel<T>::initialize(std::mt19937_64& rng) {
  disc_.initialize(rng);
  gen_.initialize(rng);
}

template <typename T>
std::vector<std::span<T>> GanModel<T>::state() {
  auto s = disc_.state();
  auto g = gen_.state();
  s.insert(s.end(), g.begin(), g.end());
  return s;
}

std::size_t PredictionVec::argmax() const {
  std::size_t best = 0;
  for (std::size_t c = 1; c < class_probs.size(); ++c) {
    if (class_probs[c] > class_probs[best]) best = c;
  }
  return best + 1;
}

PredictionVec to_prediction(std::span<const double> logits) {
  if (logits.size() < 2) throw ShapeError("discriminator output needs at least 2 entries");
  const auto p = tensor::softmax<double>(logits);
  PredictionVec v;
  v.fake_prob = p[0];
  v.class_probs.assign(p.begin() + 1, p.end());
  return v;
}

template <typename T>
Batch<T> sample_noise(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Batch<T> b;
  b.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    tensor::Tensor4<T> z({1, 1, 1, dim});
    for (T& v : z.values()) v = static_cast<T>(normal(rng));
    b.push_back(std::move(z));
  }
  return b;
}

template <typename T>
std::vector<std::vector<double>> discriminator_logits(GanModel<T>& model, const Batch<T>& cubes,
                                                      tensor::Pass pass) {
  if (tensor::batch_shape(cubes) != model.cuboid_shape()) {
    throw ShapeError("discriminator expects cubes " + tensor::to_string(model.cuboid_shape()) +
                     ", got " + tensor::to_string(cubes.front().shape()));
  }
  const Batch<T> out = model.discriminator().forward(cubes, pass);
  std::vector<std::vector<double>> logits;
  logits.reserve(out.size());
  for (const auto& t : out) logits.emplace_back(t.values().begin(), t.values().end());
  return logits;
}

template <typename T>
std::vector<PredictionVec> discriminator_forward(GanModel<T>& model, const Batch<T>& cubes,
                                                 tensor::Pass pass) {
  std::vector<PredictionVec> preds;
  for (const auto& l : discriminator_logits(model, cubes, pass)) preds.push_back(to_prediction(l));
  return preds;
}

template <typename T>
Batch<T> generator_forward(GanModel<T>& model, const Batch<T>& noise, tensor::Pass pass) {
  if (tensor::batch_shape(noise) != model.noise_shape()) {
    throw ShapeError("generator expects noise " + tensor::to_string(model.noise_shape()) +
                     ", got " + tensor::to_string(noise.front().shape()));
  }
  return model.generator().forward(noise, pass);
}

template class GanModel<float>;
template class GanModel<double>;

#define HSIGAN_INSTANTIATE(T)                                                                  \
  template Batch<T> sample_noise<T>(std::size_t, std::size_t, std::mt19937_64&);             \
  template std::vector<std::vector<double>> discriminator_logits<T>(GanModel<T>&,            \
                                                                    const Batch<T>&,         \
                                                                    tensor::Pass);           \
  template std::vector<PredictionVec> discriminator_forward<T>(GanModel<T>&, const Batch<T>&, \
                                                               tensor::Pass);                \
  template Batch<T> generator_forward<T>(GanModel<T>&, const Batch<T>&, tensor::Pass);

HSIGAN_INSTANTIATE(float)
HSIGAN_INSTANTIATE(double)
#undef HSIGAN_INSTANTIATE

}  // namespace hsigan::gan
