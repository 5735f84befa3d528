#include <doctest.h>

#include <cmath>
#include <numbers>

#include "aerostp/errors.hpp"
#include "aerostp/model.hpp"
#include "aerostp/quadrature.hpp"

using namespace aerostp;

namespace {

const ChannelParams kUrban{};
const LayerSpec kLayer{1e-5, 100.0, 1.0};

}  // namespace

TEST_SUITE("model") {

TEST_CASE("LoS probability of a vertical link") {
  // 1 / (1 + a exp(-b (90 - a))) with a = 12.4231, b = 0.1202
  CHECK(los_probability(kLayer, kUrban, 100.0) == doctest::Approx(0.9988932119845002).epsilon(1e-14));
}

TEST_CASE("LoS probability far away tends to 1 / (1 + a e^{ab})") {
  const double far = los_probability(kLayer, kUrban, 1e9);
  CHECK(far == doctest::Approx(0.017761267870117455).epsilon(1e-6));
}

TEST_CASE("environment probabilities partition unity") {
  for (double x : {100.0, 100.5, 150.0, 1e3, 1e5, 1e8}) {
    const double l = env_probability(kLayer, kUrban, Environment::kLos, x);
    const double n = env_probability(kLayer, kUrban, Environment::kNlos, x);
    CHECK(l == los_probability(kLayer, kUrban, x));
    CHECK(l >= 0.0);
    CHECK(n >= 0.0);
    CHECK(std::abs(l + n - 1.0) <= 1e-15);
  }
  CHECK(env_probability(kLayer, kUrban, Environment::kNlos, 100.0) ==
        doctest::Approx(1.0 - 0.9988932119845002).epsilon(1e-10));
}

TEST_CASE("LoS probability is monotone in distance and altitude") {
  double prev = 2.0;
  for (double x = 100.0; x < 2e4; x *= 1.01) {
    const double p = los_probability(kLayer, kUrban, x);
    CHECK(p <= prev);
    prev = p;
  }
  for (double h = 10.0; h < 1000.0; h += 10.0) {
    CHECK(los_probability(LayerSpec{1e-5, h + 10.0, 1.0}, kUrban, 2000.0) >
          los_probability(LayerSpec{1e-5, h, 1.0}, kUrban, 2000.0));
  }
}

TEST_CASE("LoS probability domain errors") {
  CHECK_THROWS_AS(los_probability(kLayer, kUrban, 99.0), DomainError);
  CHECK_THROWS_AS(los_probability(LayerSpec{1e-5, 0.0, 1.0}, kUrban, 0.0), DomainError);
  CHECK_THROWS_AS(los_probability(LayerSpec{1e-5, 0.0, 1.0}, kUrban, -1.0), DomainError);
}

TEST_CASE("LoS model hooks pin the environment") {
  ChannelParams ch;
  ch.los_model = LosModel::kAlwaysLos;
  CHECK(los_probability(kLayer, ch, 5000.0) == 1.0);
  ch.los_model = LosModel::kAlwaysNlos;
  CHECK(los_probability(kLayer, ch, 5000.0) == 0.0);
}

TEST_CASE("radial intensity") {
  const double x = 200.0;
  const double rho = 1.0 / (1.0 + kUrban.a * std::exp(-kUrban.b * (30.0 - kUrban.a)));
  CHECK(radial_intensity(kLayer, kUrban, Environment::kLos, x) ==
        doctest::Approx(2.0 * std::numbers::pi * x * 1e-5 * rho).epsilon(1e-12));
  CHECK(radial_intensity(kLayer, kUrban, Environment::kLos, x) +
            radial_intensity(kLayer, kUrban, Environment::kNlos, x) ==
        doctest::Approx(2.0 * std::numbers::pi * x * 1e-5).epsilon(1e-14));
  CHECK(radial_intensity(LayerSpec{0.0, 100.0, 1.0}, kUrban, Environment::kLos, x) == 0.0);
  CHECK(radial_intensity(kLayer, kUrban, Environment::kLos, 50.0) == 0.0);
}

TEST_CASE("radial intensity integrates to the planar count") {
  const double R = 3000.0;
  auto f = [](double x) {
    return radial_intensity(kLayer, kUrban, Environment::kLos, x) +
           radial_intensity(kLayer, kUrban, Environment::kNlos, x);
  };
  const double got = integrate_finite(f, kLayer.altitude, R, {1e-12, 0.0, 2000}).value;
  const double want = 1e-5 * std::numbers::pi * (R * R - 100.0 * 100.0);
  CHECK(got == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("average received power") {
  CHECK(avg_rx_power(1.0, 1.0, 3.3) == 1.0);
  CHECK(avg_rx_power(1.0, 100.0, 2.5) == doctest::Approx(1e-5).epsilon(1e-14));
  CHECK(avg_rx_power(1.0, 50.0, 2.5) > avg_rx_power(1.0, 51.0, 2.5));
  CHECK_THROWS_AS(avg_rx_power(1.0, 0.0, 2.5), DomainError);
}

TEST_CASE("fading samples have unit mean and variance 1/m") {
  ChannelParams ch;
  ch.m_los = 3;
  ch.m_nlos = 1;
  Rng rng(42);
  const int n = 1000000;
  for (auto env : kEnvironments) {
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = sample_fading(env, ch, rng);
      sum += g;
      sum2 += g * g;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    const double m = ch.shape(env);
    const double se = std::sqrt(1.0 / m / n);
    CHECK(std::abs(mean - 1.0) < 4.0 * se);
    // var of the sample variance of Gamma(m, 1/m): (mu4 - var^2) / n
    const double mu4 = 3.0 * (m + 2.0) / (m * m * m) ;
    const double se_var = std::sqrt((mu4 - 1.0 / (m * m)) / n);
    CHECK(std::abs(var - 1.0 / m) < 4.0 * se_var);
  }
}

TEST_CASE("fading samples are deterministic given the seed") {
  Rng a(7);
  Rng b(7);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_fading(Environment::kLos, kUrban, a) == sample_fading(Environment::kLos, kUrban, b));
  }
}

TEST_CASE("validation rules") {
  ChannelParams ch;
  CHECK_NOTHROW(validate(ch));
  ch.alpha_los = 1.9;
  CHECK_THROWS_AS(validate(ch), ValidationError);
  ch.alpha_los = 2.0;
  CHECK_THROWS_AS(validate(ch), ValidationError);  // strict > 2
  ch = {};
  ch.alpha_nlos = 2.4;
  CHECK_THROWS_AS(validate(ch), ValidationError);
  ch = {};
  ch.alpha_nlos = 6.5;
  CHECK_THROWS_AS(validate(ch), ValidationError);
  ch = {};
  ch.m_los = 0;
  CHECK_THROWS_AS(validate(ch), ValidationError);
  ch = {};
  ch.beta = 0.0;
  CHECK_THROWS_AS(validate(ch), ValidationError);
  ch = {};
  ch.noise = -1.0;
  CHECK_THROWS_AS(validate(ch), ValidationError);

  CHECK_THROWS_AS(validate(LayerSpec{-1.0, 100.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(validate(LayerSpec{1e-5, -1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(validate(LayerSpec{1e-5, 100.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(validate(NetworkSpec{{}, {}}), ValidationError);
  CHECK_THROWS_AS(validate(NetworkSpec{{LayerSpec{0.0, 100.0, 1.0}}, {}}), ValidationError);
  // co-altitude layers are legal
  CHECK_NOTHROW(validate(NetworkSpec{{kLayer, kLayer}, {}}));
}

}  // TEST_SUITE
