#include <doctest.h>

#include <cmath>
#include <numbers>

#include "toepcg/error.hpp"
#include "toepcg/kernels.hpp"
#include "toepcg/toeplitz.hpp"

using namespace toepcg;

namespace {

// y_j = sum_k phi(||j - k||) x_k over the grid [0, side)^d, last axis fastest.
Vector dense_kernel_matvec(const RadialKernel& kernel, std::size_t side, std::size_t dim,
                           const Vector& x) {
  std::size_t len = 1;
  for (std::size_t a = 0; a < dim; ++a) len *= side;
  auto coords = [&](std::size_t idx) {
    std::vector<double> c(dim);
    for (std::size_t a = dim; a-- > 0;) {
      c[a] = static_cast<double>(idx % side);
      idx /= side;
    }
    return c;
  };
  Vector y(len, 0.0);
  for (std::size_t j = 0; j < len; ++j) {
    const auto cj = coords(j);
    for (std::size_t k = 0; k < len; ++k) {
      const auto ck = coords(k);
      double r2 = 0.0;
      for (std::size_t a = 0; a < dim; ++a) r2 += (cj[a] - ck[a]) * (cj[a] - ck[a]);
      y[j] += kernel(std::sqrt(r2)) * x[k];
    }
  }
  return y;
}

double rel_error(const Vector& a, const Vector& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ref[i]) * (a[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("generator samples the kernel on the nonnegative orthant") {
  const auto g = SymToeplitz::from_kernel(RadialKernel::gaussian(1.0), 1, 1);
  REQUIRE(g.side() == 3);
  CHECK(g.generator()[0] == 1.0);
  CHECK(g.generator()[1] == doctest::Approx(std::exp(-1.0)));
  CHECK(g.generator()[2] == doctest::Approx(std::exp(-4.0)));

  const auto mq = SymToeplitz::from_kernel(RadialKernel::multiquadric(1.0), 1, 2);
  const std::size_t off[] = {1, 1};
  CHECK(mq.entry(off) == doctest::Approx(std::sqrt(3.0)));
  CHECK(mq.size() == 9);
  CHECK(mq.halfwidth() == 1);
}

TEST_CASE("dense layout") {
  const DenseMatrix a = SymToeplitz::from_kernel(RadialKernel::gaussian(1.0), 1, 1).to_dense();
  const double e1 = std::exp(-1.0), e4 = std::exp(-4.0);
  const double ref[3][3] = {{1, e1, e4}, {e1, 1, e1}, {e4, e1, 1}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(a(i, j) == doctest::Approx(ref[i][j]));
  CHECK(a.is_symmetric());
}

TEST_CASE("fft matvec agrees with the dense kernel sum") {
  Rng rng(2024);
  for (const auto& kernel : {RadialKernel::gaussian(1.0), RadialKernel::gaussian(0.1),
                             RadialKernel::multiquadric(1.0)}) {
    for (std::size_t dim : {1u, 2u}) {
      for (std::size_t n = 0; n <= 6; ++n) {
        const auto t = SymToeplitz::from_kernel(kernel, n, dim);
        const Vector x = uniform_vector(rng, t.size());
        CAPTURE(dim);
        CAPTURE(n);
        CHECK(rel_error(t.matvec(x), dense_kernel_matvec(kernel, t.side(), dim, x)) < 1e-12);
      }
    }
  }
}

TEST_CASE("even side lengths and three dimensions") {
  Rng rng(8);
  const auto mq = RadialKernel::multiquadric(0.5);
  for (std::size_t side : {2u, 4u, 10u, 128u}) {
    const auto t = SymToeplitz::from_kernel_side(mq, side, 1);
    const Vector x = uniform_vector(rng, side);
    CHECK(rel_error(t.matvec(x), dense_kernel_matvec(mq, side, 1, x)) < 1e-12);
  }
  const auto t3 = SymToeplitz::from_kernel(RadialKernel::gaussian(0.5), 2, 3);
  const Vector x = uniform_vector(rng, t3.size());
  CHECK(rel_error(t3.matvec(x), dense_kernel_matvec(RadialKernel::gaussian(0.5), 5, 3, x)) < 1e-12);
}

TEST_CASE("embedding side is the next power of two of 2 side - 1") {
  CHECK(SymToeplitz::from_kernel(RadialKernel::gaussian(1.0), 3, 1).embedding_side() == 16);
  CHECK(SymToeplitz::from_kernel(RadialKernel::gaussian(1.0), 4, 1).embedding_side() == 32);
  CHECK(SymToeplitz::from_kernel_side(RadialKernel::gaussian(1.0), 1, 1).embedding_side() == 1);
}

TEST_CASE("operator view and shape errors") {
  const auto t = SymToeplitz::from_kernel(RadialKernel::gaussian(1.0), 2, 1);
  const LinearOperator op = t.as_operator();
  const Vector x{1, 0, 0, 0, 0};
  const Vector y = op(x);
  CHECK(y[0] == 1.0);
  CHECK(y[4] == doctest::Approx(std::exp(-16.0)));
  CHECK_THROWS_AS(t.matvec(Vector(4)), Error);
  CHECK_THROWS_AS(SymToeplitz::from_generator({1.0, 2.0}, 3, 1), Error);
  try {
    SymToeplitz::from_kernel(RadialKernel::gaussian(1.0), 1000, 3, 1 << 20);
    FAIL("expected budget error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSize);
  }
}

TEST_CASE("gaussian eigenvalues lie between the symbol extremes") {
  const auto g = RadialKernel::gaussian(1.0);
  const double lo = symbol_gaussian(g, std::numbers::pi), hi = symbol_gaussian(g, 0.0);
  for (std::size_t n : {1u, 4u, 16u}) {
    const auto eig = jacobi_eigs(SymToeplitz::from_kernel(g, n, 1).to_dense()).eigenvalues;
    CHECK(eig.front() >= lo - 1e-8);
    CHECK(eig.back() <= hi + 1e-8);
  }
}

TEST_CASE("banded symbol: matvec, dense form and trigonometric polynomial") {
  const BandedSymbol b({2.0, -0.5, 0.25});
  CHECK(b.halfband() == 2);
  CHECK(b.symbol_at_zero() == doctest::Approx(2.0 - 1.0 + 0.5));
  for (double xi : {0.0, 0.7, std::numbers::pi}) {
    const double ref = 2.0 + 2.0 * (-0.5 * std::cos(xi) + 0.25 * std::cos(2.0 * xi));
    CHECK(b.symbol_eval(xi) == doctest::Approx(ref));
    CHECK(symbol_eval(b, xi) == b.symbol_eval(xi));
  }
  Rng rng(4);
  for (std::size_t len : {1u, 2u, 3u, 7u, 40u}) {
    const Vector x = uniform_vector(rng, len);
    Vector ref(len, 0.0);
    for (std::size_t i = 0; i < len; ++i)
      for (std::size_t j = 0; j < len; ++j) {
        const std::size_t d = i > j ? i - j : j - i;
        if (d <= 2) ref[i] += b[d] * x[j];
      }
    const Vector y = banded_matvec(b, x);
    const Vector z = b.to_dense(len).multiply(x);
    const Vector w = b.as_operator(len)(x);
    for (std::size_t i = 0; i < len; ++i) {
      CHECK(y[i] == doctest::Approx(ref[i]).epsilon(1e-14));
      CHECK(z[i] == doctest::Approx(ref[i]).epsilon(1e-14));
      CHECK(w[i] == y[i]);
    }
  }
  CHECK_THROWS_AS(BandedSymbol(std::vector<double>{}), Error);
}
