#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "radpair/numerics.hpp"
#include "radpair/spin.hpp"

using namespace radpair;

TEST_SUITE("numerics") {
  TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
    for (std::size_t n : {1, 2, 5, 16, 64, 192}) {
      const QuadratureRule r = gauss_legendre(n);
      REQUIRE(r.nodes.size() == n);
      double w = 0.0;
      for (double x : r.weights) w += x;
      CHECK(w == doctest::Approx(2.0).epsilon(1e-13));
      const std::size_t deg = std::min<std::size_t>(2 * n - 1, 30);
      double integral = 0.0;
      for (std::size_t i = 0; i < n; ++i) integral += r.weights[i] * std::pow(r.nodes[i], static_cast<double>(deg - 1));
      const double want = (deg - 1) % 2 == 0 ? 2.0 / static_cast<double>(deg) : 0.0;
      CHECK(std::abs(integral - want) < 1e-13);
    }
    CHECK_THROWS_AS(gauss_legendre(0), ConfigError);
  }

  TEST_CASE("adaptive integration") {
    CHECK(integrate([](double t) { return std::exp(-t); }, 0, 50, 1e-13) == doctest::Approx(1.0).epsilon(1e-12));
    const double osc = integrate([](double t) { return std::cos(40 * t) * std::exp(-t); }, 0, 50, 1e-13, 0.5);
    CHECK(std::abs(osc - 1.0 / (1 + 1600.0)) < 1e-12);
    CHECK(integrate([](double) { return 1.0; }, 1, 1) == 0.0);
    CHECK_THROWS_AS(integrate([](double) { return std::nan(""); }, 0, 1), NumericalError);
  }

  TEST_CASE("derivative stencil") {
    const Stencil s = derivative_stencil(2.0, 1.0);
    double sum = 0.0, first = 0.0, third = 0.0;
    for (std::size_t i = 0; i < s.offsets.size(); ++i) {
      sum += s.weights[i];
      first += s.weights[i] * s.offsets[i];
      third += s.weights[i] * std::pow(s.offsets[i], 3);
    }
    CHECK(std::abs(sum) < 1e-9);
    CHECK(first == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(third) < 1e-14);
    CHECK_THROWS_AS(derivative_stencil(0.0, 0.0), ConfigError);
  }

  TEST_CASE("dB_derivative accuracy") {
    CHECK(std::abs(dB_derivative([](double) { return 3.0; }, 1.0)) < 1e-10);
    CHECK(dB_derivative([](double x) { return std::sin(x); }, 0.7) == doctest::Approx(std::cos(0.7)).epsilon(1e-10));
    const double k = 1.3;
    for (double B : {0.1, 0.5, 2.0}) {
      const auto yx = [k](double b) { return k * k / (4 * b * b + k * k); };
      const double want = -8 * B * k * k / std::pow(4 * B * B + k * k, 2);
      CHECK(std::abs(dB_derivative(yx, B, k) - want) < 1e-7 * std::abs(want));
    }
  }

  TEST_CASE("minimizers") {
    const Minimum m = minimize([](double x) { return (x - 1.234) * (x - 1.234) + 2; }, 0, 3);
    CHECK(m.x == doctest::Approx(1.234).epsilon(1e-7));
    CHECK(m.value == doctest::Approx(2.0));
    const Minimum s = minimize_scan([](double x) { return std::cos(3 * x) + 0.1 * x; }, 0, 6, 40);
    CHECK(s.x == doctest::Approx((std::numbers::pi - std::asin(0.1 / 3)) / 3).epsilon(1e-7));
    CHECK_THROWS_AS(minimize([](double x) { return x; }, 1, 1), ConfigError);
  }

  TEST_CASE("parallel_for writes by index and propagates errors") {
    std::vector<int> out(1000, -1);
    parallel_for(out.size(), [&](std::size_t i) { out[i] = static_cast<int>(i * i % 97); }, 4);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i % 97));
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                      if (i == 7) throw ConfigError("boom");
                    }, 3),
                    ConfigError);
    std::atomic<int> calls{0};
    parallel_for(0, [&](std::size_t) { ++calls; });
    CHECK(calls == 0);
  }
}
