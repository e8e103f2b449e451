#include <doctest.h>

#include <cmath>
#include <numbers>

#include "toepcg/error.hpp"
#include "toepcg/kernels.hpp"

using namespace toepcg;

namespace {

constexpr double kPi = std::numbers::pi;

// K1(x) = int_0^inf exp(-x cosh t) cosh t dt; the integrand is smooth and
// decays doubly exponentially, so the trapezoid rule converges fast.
double k1_quadrature(double x) {
  const double h = 1e-3;
  double s = 0.5 * std::exp(-x);
  for (int i = 1;; ++i) {
    const double t = h * i;
    const double v = std::exp(-x * std::cosh(t)) * std::cosh(t);
    s += v;
    if (v < 1e-300 || (t > 1.0 && v < 1e-20 * s)) break;
  }
  return s * h;
}

// Poisson summation on the frequency side: sum_k sqrt(pi/lambda) exp(-(xi + 2 pi k)^2 / (4 lambda)).
double gaussian_symbol_frequency(double lambda, double xi) {
  double s = 0.0;
  for (int k = -40; k <= 40; ++k) {
    const double w = xi + 2.0 * kPi * k;
    s += std::sqrt(kPi / lambda) * std::exp(-w * w / (4.0 * lambda));
  }
  return s;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("kernel values") {
  const auto g = RadialKernel::gaussian(1.0);
  CHECK(g(0.0) == 1.0);
  CHECK(g(2.0) == doctest::Approx(std::exp(-4.0)));
  const auto mq = RadialKernel::multiquadric(1.0);
  CHECK(mq(0.0) == 1.0);
  CHECK(mq(std::sqrt(2.0)) == doctest::Approx(std::sqrt(3.0)));
  CHECK(phi(RadialKernel::gaussian(0.5), 2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(mq.describe() == "multiquadric(c=1)");
  CHECK(g.name() == "gaussian");
}

TEST_CASE("kernel parameter and domain errors") {
  CHECK(code_of([] { RadialKernel::gaussian(0.0); }) == ErrorCode::kParameter);
  CHECK(code_of([] { RadialKernel::multiquadric(-1.0); }) == ErrorCode::kParameter);
  CHECK(code_of([] { RadialKernel::gaussian(1.0)(-0.5); }) == ErrorCode::kDomain);
  CHECK(code_of([] { bessel_k1(0.0); }) == ErrorCode::kDomain);
  CHECK(code_of([] { phi_hat_mq(RadialKernel::multiquadric(1.0), 0.0); }) == ErrorCode::kPole);
  CHECK(code_of([] { symbol_mq(RadialKernel::multiquadric(1.0), 2.0 * kPi); }) == ErrorCode::kPole);
  CHECK(code_of([] { symbol_mq(RadialKernel::multiquadric(1.0), 0.0); }) == ErrorCode::kPole);
}

TEST_CASE("bessel K1 matches the integral representation") {
  for (double x : {1e-3, 0.05, 0.3, 1.0, 1.9, 2.0, 2.1, 3.7, 8.0, 20.0, 60.0}) {
    CAPTURE(x);
    CHECK(bessel_k1(x) == doctest::Approx(k1_quadrature(x)).epsilon(1e-11));
  }
}

TEST_CASE("bessel K1 limits") {
  // Small argument: K1(x) ~ 1/x.
  CHECK(bessel_k1(1e-8) * 1e-8 == doctest::Approx(1.0).epsilon(1e-9));
  // Large argument: sqrt(pi/2x) e^{-x} (1 + 3/(8x) - 15/(128 x^2)).
  const double x = 200.0;
  const double asym = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) * (1.0 + 3.0 / (8.0 * x) - 15.0 / (128.0 * x * x));
  CHECK(bessel_k1(x) == doctest::Approx(asym).epsilon(1e-7));
}

TEST_CASE("gaussian transform and symbol") {
  const auto g = RadialKernel::gaussian(1.0);
  CHECK(phi_hat_gaussian(g, 0.0) == doctest::Approx(std::sqrt(kPi)));
  CHECK(symbol_gaussian(g, 0.0) == doctest::Approx(1.7726372).epsilon(1e-7));
  CHECK(symbol_gaussian(g, kPi) == doctest::Approx(0.3006258).epsilon(1e-6));
  for (double lambda : {0.05, 0.3, 1.0, 4.0}) {
    const auto k = RadialKernel::gaussian(lambda);
    const SymbolFunction sigma(k);
    for (double xi : {0.0, 0.4, 1.3, kPi, 4.4, 6.0}) {
      CAPTURE(lambda);
      CAPTURE(xi);
      CHECK(sigma(xi) == doctest::Approx(gaussian_symbol_frequency(lambda, xi)).epsilon(1e-12));
    }
  }
}

TEST_CASE("gaussian truncation is converged") {
  for (double lambda : {0.01, 0.1, 1.0, 10.0}) {
    const SymbolFunction sigma(RadialKernel::gaussian(lambda));
    CHECK(sigma.truncation() == gaussian_truncation(lambda));
    // Absolute scale: for small lambda the symbol near pi is far below rounding.
    const double scale = sigma(0.0);
    for (double xi : {0.2, 2.0, 3.1}) {
      const double a = sigma(xi);
      CHECK(std::abs(sigma.evaluate_with(xi, sigma.truncation() + 20) - a) <= 1e-14 * scale);
    }
  }
}

TEST_CASE("multiquadric transform") {
  const auto mq = RadialKernel::multiquadric(1.0);
  CHECK(phi_hat_mq(mq, 2.0) == doctest::Approx(-bessel_k1(2.0)));
  CHECK(phi_hat_mq(mq, -2.0) == phi_hat_mq(mq, 2.0));
  // Near zero the transform behaves like -2/xi^2.
  CHECK(phi_hat_mq(mq, 1e-4) * 1e-8 == doctest::Approx(-2.0).epsilon(1e-6));
  const auto mq0 = RadialKernel::multiquadric(0.0);
  CHECK(phi_hat_mq(mq0, 0.7) == doctest::Approx(-2.0 / 0.49));
}

TEST_CASE("multiquadric symbol against the c = 0 closed form and a long lattice sum") {
  // c = 0: sum_k -2 / (xi + 2 pi k)^2 = -1 / (2 sin^2(xi / 2)).
  const auto mq0 = RadialKernel::multiquadric(0.0);
  for (double xi : {0.3, 1.0, kPi, 5.0}) {
    const double s = std::sin(xi / 2.0);
    CHECK(symbol_mq(mq0, xi) == doctest::Approx(-1.0 / (2.0 * s * s)).epsilon(1e-13));
  }
  for (double c : {0.25, 1.0, 3.0}) {
    const auto mq = RadialKernel::multiquadric(c);
    for (double xi : {0.01, 0.5, 2.0, kPi, 5.5}) {
      double ref = 0.0;
      for (int k = -4000; k <= 4000; ++k) ref += phi_hat_mq(mq, xi + 2.0 * kPi * k);
      CAPTURE(c);
      CAPTURE(xi);
      CHECK(symbol_mq(mq, xi) == doctest::Approx(ref).epsilon(1e-11));
    }
  }
}

TEST_CASE("multiquadric symbol shape") {
  const SymbolFunction sigma(RadialKernel::multiquadric(1.0));
  CHECK(sigma(kPi) < 0.0);
  // Even about pi, 2 pi periodic, |sigma| smallest at pi.
  for (double xi : {0.1, 0.9, 2.5}) {
    CHECK(sigma(xi) == doctest::Approx(sigma(2.0 * kPi - xi)).epsilon(1e-13));
    CHECK(sigma(xi) == doctest::Approx(sigma(xi + 2.0 * kPi)).epsilon(1e-12));
    CHECK(std::abs(sigma(xi)) > std::abs(sigma(kPi)));
  }
  // The double pole: xi^2 sigma(xi) -> -2.
  CHECK(sigma(1e-5) * 1e-10 == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("symbol dispatch") {
  const auto g = RadialKernel::gaussian(2.0);
  const auto mq = RadialKernel::multiquadric(0.5);
  CHECK(symbol(g, 1.0) == symbol_gaussian(g, 1.0));
  CHECK(symbol(mq, 1.0) == symbol_mq(mq, 1.0));
  CHECK(SymbolFunction(mq)(1.0) == doctest::Approx(symbol_mq(mq, 1.0)).epsilon(1e-15));
  CHECK(multiquadric_truncation(0.0) == 0);
  CHECK(multiquadric_truncation(0.1) >= multiquadric_truncation(1.0));
}
