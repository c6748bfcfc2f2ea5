#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "doctest.h"
#include "hsigan/tensor/adam.hpp"
#include "hsigan/tensor/layers.hpp"
#include "hsigan/tensor/ops.hpp"
#include "support/gradcheck.hpp"

using namespace hsigan;
using namespace hsigan::tensor;

namespace {

Tensor4<double> from(Shape4 s, std::vector<double> v) { return Tensor4<double>(s, std::move(v)); }

// Textbook zero-padded cross-correlation, written independently of conv_forward.
Tensor4<double> naive_conv(const Tensor4<double>& x, const ConvParams<double>& p) {
  const auto& g = p.geometry;
  const Shape4 in = x.shape();
  const auto out_extent = [](std::size_t n, std::size_t k, std::size_t s, std::size_t pad) {
    return (n + 2 * pad - k) / s + 1;
  };
  Shape4 os{out_extent(in.height, g.kernel_spatial, g.stride_spatial, g.pad_spatial),
            out_extent(in.width, g.kernel_spatial, g.stride_spatial, g.pad_spatial),
            out_extent(in.bands, g.kernel_bands, g.stride_spectral, g.pad_spectral),
            g.out_channels};
  auto padded = [&](long h, long w, long b, std::size_t c) {
    if (h < 0 || w < 0 || b < 0 || h >= long(in.height) || w >= long(in.width) ||
        b >= long(in.bands)) {
      return 0.0;
    }
    return x(h, w, b, c);
  };
  Tensor4<double> out(os);
  for (std::size_t oy = 0; oy < os.height; ++oy)
    for (std::size_t ox = 0; ox < os.width; ++ox)
      for (std::size_t ob = 0; ob < os.bands; ++ob)
        for (std::size_t oc = 0; oc < g.out_channels; ++oc) {
          double s = p.bias[oc];
          for (std::size_t ky = 0; ky < g.kernel_spatial; ++ky)
            for (std::size_t kx = 0; kx < g.kernel_spatial; ++kx)
              for (std::size_t kb = 0; kb < g.kernel_bands; ++kb)
                for (std::size_t ic = 0; ic < g.in_channels; ++ic) {
                  const std::size_t widx =
                      (((ky * g.kernel_spatial + kx) * g.kernel_bands + kb) * g.in_channels + ic) *
                          g.out_channels +
                      oc;
                  s += p.kernel[widx] *
                       padded(long(oy * g.stride_spatial + ky) - long(g.pad_spatial),
                              long(ox * g.stride_spatial + kx) - long(g.pad_spatial),
                              long(ob * g.stride_spectral + kb) - long(g.pad_spectral), ic);
                }
          out(oy, ox, ob, oc) = s;
        }
  return out;
}

}  // namespace

TEST_CASE("conv_spectral hand-evaluated dot product") {
  ConvParams<double> p(ConvGeometry::spectral(1, 1, 3));
  p.kernel = {1, 0, -1};
  const auto y = conv_spectral(from({1, 1, 3, 1}, {1, 2, 3}), p);
  CHECK(y.shape() == Shape4{1, 1, 1, 1});
  CHECK(y(0, 0, 0, 0) == doctest::Approx(-2.0));
}

TEST_CASE("conv_spectral identity kernel with same padding returns the input") {
  std::mt19937_64 rng(1);
  ConvParams<double> p(ConvGeometry::spectral(1, 1, 7, 1, 3));
  p.kernel = {0, 0, 0, 1, 0, 0, 0};
  const auto x = testing::random_batch({2, 3, 11, 1}, 1, rng).front();
  CHECK(conv_spectral(x, p) == x);
}

TEST_CASE("conv_spectral output band count") {
  const auto g = ConvGeometry::spectral(1, 4, 7, 2, 0);
  CHECK(conv_output_shape(g, {9, 9, 103, 1}).bands == 49);
}

TEST_CASE("conv_spatial overlap counts and size preservation") {
  ConvParams<double> p(ConvGeometry::spatial(1, 1, 3, 1, 1));
  std::fill(p.kernel.begin(), p.kernel.end(), 1.0);
  const auto y = conv_spatial(Tensor4<double>({3, 3, 1, 1}, 1.0), p);
  CHECK(y(1, 1, 0, 0) == doctest::Approx(9.0));
  CHECK(y(0, 0, 0, 0) == doctest::Approx(4.0));
  CHECK(y(2, 2, 0, 0) == doctest::Approx(4.0));
  CHECK(y(0, 1, 0, 0) == doctest::Approx(6.0));

  ConvParams<float> q(ConvGeometry::spatial(5, 3, 3, 1, 1));
  CHECK(conv_spatial(Tensor4<float>({9, 9, 1, 5}), q).shape() == Shape4{9, 9, 1, 3});
}

TEST_CASE("conv_spatial identity 1x1 kernel") {
  std::mt19937_64 rng(2);
  ConvParams<double> p(ConvGeometry::spatial(3, 3, 1));
  for (std::size_t c = 0; c < 3; ++c) p.kernel[c * 3 + c] = 1.0;
  const auto x = testing::random_batch({4, 5, 1, 3}, 1, rng).front();
  CHECK(conv_spatial(x, p) == x);
}

TEST_CASE("conv error paths") {
  ConvParams<double> spatial(ConvGeometry::spatial(1, 1, 3));
  CHECK_THROWS_AS(conv_spatial(Tensor4<double>({9, 9, 4, 1}), spatial), ContractError);
  CHECK_THROWS_AS(conv_spatial(Tensor4<double>({2, 2, 1, 1}), spatial), ShapeError);
  ConvParams<double> spectral(ConvGeometry::spectral(1, 1, 7));
  CHECK_THROWS_WITH_AS(conv_spectral(Tensor4<double>({1, 1, 5, 1}), spectral),
                       doctest::Contains("bands"), ShapeError);
  CHECK_THROWS_WITH_AS(conv_spectral(Tensor4<double>({1, 1, 9, 2}), spectral),
                       doctest::Contains("channels"), ShapeError);
  CHECK_THROWS_AS(conv_spectral(Tensor4<double>({1, 1, 9, 1}), spatial), ContractError);
}

TEST_CASE("conv_forward agrees with a naive cross-correlation") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 10; ++trial) {
    ConvParams<double> spec(ConvGeometry::spectral(2, 3, 5, 1 + trial % 2, trial % 3));
    ConvParams<double> spat(ConvGeometry::spatial(4, 2, 3, 1 + trial % 2, trial % 2));
    for (auto* p : {&spec, &spat}) {
      for (double& w : p->kernel) w = normal(rng);
      for (double& b : p->bias) b = normal(rng);
    }
    const auto xs = testing::random_batch({3, 2, 12, 2}, 1, rng).front();
    const auto xp = testing::random_batch({7, 6, 1, 4}, 1, rng).front();
    const auto a = conv_spectral(xs, spec);
    const auto b = naive_conv(xs, spec);
    const auto c = conv_spatial(xp, spat);
    const auto d = naive_conv(xp, spat);
    REQUIRE(a.shape() == b.shape());
    REQUIRE(c.shape() == d.shape());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.data()[i] == doctest::Approx(b.data()[i]));
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c.data()[i] == doctest::Approx(d.data()[i]));
  }
}

TEST_CASE("tconv_spectral single element copies the kernel") {
  ConvParams<double> p(ConvGeometry::spectral(1, 1, 3));
  p.kernel = {1, 2, 3};
  const auto y = tconv_spectral(from({1, 1, 1, 1}, {1}), p);
  REQUIRE(y.shape() == Shape4{1, 1, 3, 1});
  CHECK(y(0, 0, 0, 0) == 1.0);
  CHECK(y(0, 0, 1, 0) == 2.0);
  CHECK(y(0, 0, 2, 0) == 3.0);
}

TEST_CASE("transposed output extents") {
  CHECK(tconv_output_shape(ConvGeometry::spectral(1, 1, 7, 2, 0), {1, 1, 25, 1}).bands == 55);
  const auto g = ConvGeometry::spatial(1, 1, 3);
  Shape4 s{1, 1, 1, 1};
  std::vector<std::size_t> sizes;
  for (int i = 0; i < 4; ++i) {
    s = tconv_output_shape(g, s);
    sizes.push_back(s.height);
    CHECK(s.width == s.height);
  }
  CHECK(sizes == std::vector<std::size_t>{3, 5, 7, 9});
  CHECK_THROWS_AS(tconv_output_shape(ConvGeometry::spectral(1, 1, 1, 1, 1), {1, 1, 1, 1}),
                  ShapeError);
}

TEST_CASE("adjoint identity between convolutions and their transposes") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    for (ConvKind kind : {ConvKind::spectral, ConvKind::spatial}) {
      const auto d = testing::adjoint_draw(kind, rng);
      REQUIRE(std::isfinite(d.rhs));
      CHECK(d.gap() < 1e-10);
    }
  }
}

TEST_CASE("activations") {
  const auto x = from({1, 1, 3, 1}, {-0.5, -2.0, 1.0});
  const auto l = activate(Activation::lrelu, x);
  CHECK(l(0, 0, 0, 0) == doctest::Approx(-0.1));
  CHECK(l(0, 0, 2, 0) == 1.0);
  CHECK(activate(Activation::relu, x)(0, 0, 1, 0) == 0.0);
  const auto t = activate(Activation::tanh, from({1, 1, 2, 1}, {-30.0, 30.0}));
  CHECK(t(0, 0, 0, 0) >= -1.0);
  CHECK(t(0, 0, 1, 0) <= 1.0);
}

TEST_CASE("batchnorm train mode normalizes each channel") {
  std::mt19937_64 rng(4);
  Batch<double> x = testing::random_batch({3, 3, 2, 4}, 6, rng);
  for (auto& t : x)
    for (double& v : t.values()) v = 5.0 + 3.0 * v;
  BatchNormParams<double> p(4);
  BatchNormCache<double> cache;
  batchnorm(x, p, Mode::train, &cache);
  for (std::size_t c = 0; c < 4; ++c) {
    double sum = 0, sq = 0, n = 0;
    for (const auto& t : cache.normalized) {
      for (std::size_t i = c; i < t.size(); i += 4) {
        sum += t.data()[i];
        sq += t.data()[i] * t.data()[i];
        n += 1;
      }
    }
    const double mean = sum / n;
    CHECK(std::abs(mean) < 1e-6);
    CHECK(std::abs(sq / n - mean * mean - 1.0) < 1e-4);
  }
  // running statistics moved toward the batch statistics
  CHECK(p.running_mean[0] > 0.0);
}

TEST_CASE("batchnorm infer mode with unit running stats is the identity") {
  std::mt19937_64 rng(5);
  const Batch<double> x = testing::random_batch({2, 2, 2, 3}, 1, rng);
  BatchNormParams<double> p(3);
  const auto y = batchnorm(x, p, Mode::infer);
  for (std::size_t i = 0; i < x[0].size(); ++i) {
    CHECK(y[0].data()[i] == doctest::Approx(x[0].data()[i] / std::sqrt(1.0 + kBatchNormEpsilon)));
  }
}

TEST_CASE("batchnorm constant channel stays finite and batch-of-one is rejected") {
  Batch<double> x(3, Tensor4<double>({2, 2, 1, 1}, 7.0));
  BatchNormParams<double> p(1);
  const auto y = batchnorm(x, p, Mode::train);
  for (const auto& t : y) CHECK(t.all_finite());
  CHECK(y[0](0, 0, 0, 0) == 0.0);
  CHECK_THROWS_AS(batchnorm(Batch<double>(1, x[0]), p, Mode::train), ContractError);
}

TEST_CASE("dense softmax") {
  DenseParams<double> p(3, 4);
  const std::vector<double> x{0.3, -1.0, 2.0};
  for (double v : dense_softmax<double>(x, p)) CHECK(v == doctest::Approx(0.25));

  const std::vector<double> big{1000.0, 0.0};
  const auto s = softmax<double>(big);
  CHECK(std::isfinite(s[0]));
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] < 1e-300);

  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal(0, 5);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> z(7), shifted(7);
    for (std::size_t k = 0; k < 7; ++k) {
      z[k] = normal(rng);
      shifted[k] = z[k] + 123.25;
    }
    const auto a = softmax<double>(z);
    const auto b = softmax<double>(shifted);
    CHECK(std::abs(std::accumulate(a.begin(), a.end(), 0.0) - 1.0) < 1e-9);
    for (std::size_t k = 0; k < 7; ++k) {
      CHECK(a[k] > 0.0);
      CHECK(std::abs(a[k] - b[k]) < 1e-9);
    }
  }
}

TEST_CASE("backprop linearity and identity kernels") {
  std::mt19937_64 rng(7);
  ConvLayer<double> conv(ConvGeometry::spatial(2, 2, 3, 1, 1), false);
  conv.initialize(rng);
  const auto x = testing::random_batch({5, 5, 1, 2}, 2, rng);
  conv.zero_grad();
  conv.forward(x, {Mode::train});
  const auto gin = conv.backward(Batch<double>(2, Tensor4<double>({5, 5, 1, 2})), true);
  for (const auto& slot : conv.parameters())
    for (double g : slot.grad) CHECK(g == 0.0);
  for (const auto& t : gin)
    for (double g : t.values()) CHECK(g == 0.0);

  ConvLayer<double> identity(ConvGeometry::spectral(1, 1, 3, 1, 1), false);
  identity.params().kernel = {0, 1, 0};
  const auto xi = testing::random_batch({2, 2, 6, 1}, 2, rng);
  const auto up = testing::random_batch({2, 2, 6, 1}, 2, rng);
  identity.forward(xi, {Mode::train});
  const auto gi = identity.backward(up, true);
  for (std::size_t n = 0; n < 2; ++n) CHECK(gi[n] == up[n]);
}

TEST_CASE("backward without a cached forward is a contract error") {
  ConvLayer<double> conv(ConvGeometry::spectral(1, 1, 3), false);
  CHECK_THROWS_AS(conv.backward(Batch<double>(1, Tensor4<double>({1, 1, 1, 1})), true), ContractError);
  BatchNormLayer<double> bn(1);
  CHECK_THROWS_AS(bn.backward(Batch<double>(2, Tensor4<double>({1, 1, 1, 1})), true), ContractError);
}

TEST_CASE("every layer kind matches central finite differences") {
  std::mt19937_64 rng(8);
  const Pass train{Mode::train, false};

  auto run = [&](Layer<double>& layer, const Shape4& in, std::size_t n, double away = 0.0) {
    layer.initialize(rng);
    for (auto& slot : layer.parameters())
      for (double& v : slot.value) v += 0.1 * std::normal_distribution<double>()(rng);
    const auto res = testing::check_layer(layer, testing::random_batch(in, n, rng, away), train,
                                          rng, 100, 50);
    INFO(layer.name() << " max rel error " << res.max_rel_error);
    CHECK(res.probes >= (layer.parameters().empty() ? 50u : 150u));
    CHECK(res.ok());
  };

  ConvLayer<double> spec(ConvGeometry::spectral(2, 3, 7, 2, 0), false);
  run(spec, {3, 3, 15, 2}, 2);
  ConvLayer<double> spec_same(ConvGeometry::spectral(3, 3, 7, 1, 3), false);
  run(spec_same, {2, 2, 5, 3}, 2);
  ConvLayer<double> spat(ConvGeometry::spatial(6, 4, 3, 1, 1), false);
  run(spat, {5, 5, 1, 6}, 2);
  ConvLayer<double> tspec(ConvGeometry::spectral(3, 2, 7, 2, 0), true);
  run(tspec, {1, 1, 4, 3}, 2);
  ConvLayer<double> tspat(ConvGeometry::spatial(5, 3, 3), true);
  run(tspat, {3, 3, 1, 5}, 2);
  DenseLayer<double> dense(2 * 2 * 3 * 2, {1, 1, 1, 5});
  run(dense, {2, 2, 3, 2}, 3);
  BatchNormLayer<double> bn(3);
  run(bn, {2, 3, 2, 3}, 4);
  for (Activation a : {Activation::lrelu, Activation::relu, Activation::tanh}) {
    ActivationLayer<double> act(a);
    run(act, {2, 2, 3, 2}, 2, 1e-3);
  }
}

TEST_CASE("adam_step") {
  std::vector<double> w{0.5, -1.0, 2.0};
  std::vector<double> g{0.3, -0.2, 4.0};
  std::vector<ParamSlot<double>> slots{{w, g}};

  SUBCASE("zero learning rate leaves parameters bit-identical") {
    AdamState<double> st;
    st.lr = 0.0;
    const auto before = w;
    adam_step<double>(slots, st);
    CHECK(w == before);
    CHECK(st.step_count == 1);
    adam_step<double>(slots, st);
    CHECK(st.step_count == 2);
  }
  SUBCASE("first step with a constant gradient") {
    AdamState<double> st;
    const auto before = w;
    adam_step<double>(slots, st);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double expected = -st.lr * g[i] / (std::abs(g[i]) + st.epsilon);
      CHECK(w[i] - before[i] == doctest::Approx(expected).epsilon(1e-9));
    }
    CHECK(st.first_moment.size() == 3);
  }
  SUBCASE("NaN gradient aborts without touching parameters") {
    AdamState<double> st;
    g[1] = std::numeric_limits<double>::quiet_NaN();
    const auto before = w;
    CHECK_THROWS_AS(adam_step<double>(slots, st), NumericError);
    CHECK(w == before);
    CHECK(st.step_count == 0);
  }
}
