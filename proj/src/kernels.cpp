#include "toepcg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "toepcg/error.hpp"

namespace toepcg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286060651209;
constexpr double kSymbolTailTolerance = 1e-12;
constexpr int kMaxLatticeTruncation = 1'000'000;

// Series for x <= 2 (Abramowitz & Stegun 9.6.11 with n = 1).
double bessel_k1_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;  // q^k / (k! (k+1)!)
  double harmonic = 0.0;
  double i1_sum = 0.0;
  double psi_sum = 0.0;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      term *= q / (static_cast<double>(k) * static_cast<double>(k + 1));
      harmonic += 1.0 / k;
    }
    // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
    const double psi = -2.0 * kEulerGamma + 2.0 * harmonic + 1.0 / (k + 1);
    i1_sum += term;
    psi_sum += psi * term;
    if (term < 1e-18 * i1_sum) break;
  }
  const double i1 = 0.5 * x * i1_sum;
  return 1.0 / x + std::log(0.5 * x) * i1 - 0.25 * x * psi_sum;
}

// Steed's continued fraction (Temme's CF2) for x > 2: yields K0 and K1
// together; the ratio is a rational function of the recurrence.
double bessel_k1_continued_fraction(double x) {
  const double a1 = 0.25;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 10000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-17) break;
  }
  h *= a1;
  const double k0 = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
  return k0 * (x + 0.5 - h) / x;
}

// Upper bound on |phi_hat| at |xi| = x from K1(y) <= sqrt(pi/(2y)) e^-y (1 + 1/y).
double mq_transform_bound(double c, double x) {
  const double y = c * x;
  return (2.0 * c / x) * std::sqrt(kPi / (2.0 * y)) * std::exp(-y) * (1.0 + 1.0 / y);
}

double reduce_to_period(double xi) {
  double t = std::fmod(xi, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------

RadialKernel RadialKernel::gaussian(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw Error(ErrorCode::kParameter, "Gaussian lambda must be positive");
  return RadialKernel(KernelKind::kGaussian, lambda);
}

RadialKernel RadialKernel::multiquadric(double c) {
  if (!(c >= 0.0) || !std::isfinite(c))
    throw Error(ErrorCode::kParameter, "multiquadric c must be nonnegative");
  return RadialKernel(KernelKind::kMultiquadric, c);
}

std::string RadialKernel::name() const {
  return is_gaussian() ? "gaussian" : "multiquadric";
}

std::string RadialKernel::describe() const {
  std::ostringstream os;
  os << name() << (is_gaussian() ? "(lambda=" : "(c=") << param_ << ")";
  return os.str();
}

double RadialKernel::operator()(double r) const {
  if (!(r >= 0.0)) throw Error(ErrorCode::kDomain, "phi: negative radius");
  if (is_gaussian()) return std::exp(-param_ * r * r);
  return std::sqrt(r * r + param_ * param_);
}

double phi(const RadialKernel& kernel, double r) { return kernel(r); }

double bessel_k1(double x) {
  if (!(x > 0.0)) throw Error(ErrorCode::kDomain, "bessel_k1: argument must be positive");
  if (std::isinf(x)) return 0.0;
  return x <= 2.0 ? bessel_k1_series(x) : bessel_k1_continued_fraction(x);
}

double phi_hat_mq(const RadialKernel& kernel, double xi) {
  if (!kernel.is_multiquadric())
    throw Error(ErrorCode::kParameter, "phi_hat_mq needs a multiquadric kernel");
  if (xi == 0.0) throw Error(ErrorCode::kPole, "multiquadric transform at xi = 0");
  const double c = kernel.parameter();
  const double ax = std::abs(xi);
  if (c == 0.0) return -2.0 / (ax * ax);
  return -(2.0 * c / ax) * bessel_k1(c * ax);
}

double phi_hat_gaussian(const RadialKernel& kernel, double xi) {
  if (!kernel.is_gaussian())
    throw Error(ErrorCode::kParameter, "phi_hat_gaussian needs a Gaussian kernel");
  const double lambda = kernel.parameter();
  return std::sqrt(kPi / lambda) * std::exp(-xi * xi / (4.0 * lambda));
}

int gaussian_truncation(double lambda) {
  return std::max(10, static_cast<int>(std::ceil(std::sqrt(30.0 / lambda))));
}

int multiquadric_truncation(double c) {
  if (c == 0.0) return 0;  // closed form, see symbol_mq
  for (int k = 1; k <= kMaxLatticeTruncation; k = k < 64 ? k + 1 : 2 * k) {
    double tail = 0.0;
    for (long j = k;; ++j) {
      const double term = mq_transform_bound(c, kTwoPi * static_cast<double>(j));
      tail += 2.0 * term;
      if (term < 1e-6 * kSymbolTailTolerance || j - k > 4 * kMaxLatticeTruncation) break;
    }
    if (tail < kSymbolTailTolerance) return k;
  }
  throw Error(ErrorCode::kParameter, "multiquadric c too small for the lattice sum");
}

namespace {

double gaussian_spatial_sum(double lambda, double xi, int truncation) {
  double s = 0.0;
  for (int j = truncation; j >= 1; --j) {
    const double jd = static_cast<double>(j);
    s += std::exp(-lambda * jd * jd) * std::cos(jd * xi);
  }
  return 1.0 + 2.0 * s;
}

// Sums k in [-K, K-1]; the reflection xi -> 2 pi - xi maps this set onto
// itself (k -> -k-1), so the truncated sum is exactly even about pi.
double mq_lattice_sum(const RadialKernel& kernel, double xi, int truncation) {
  const double t = reduce_to_period(xi);
  if (t == 0.0) throw Error(ErrorCode::kPole, "multiquadric symbol on the lattice 2 pi Z");
  const double c = kernel.parameter();
  if (c == 0.0) {
    const double s = std::sin(0.5 * t);
    return -0.5 / (s * s);
  }
  double sum = 0.0;
  for (int k = truncation - 1; k >= 0; --k) {
    const double kd = static_cast<double>(k);
    sum += phi_hat_mq(kernel, t + kTwoPi * kd) + phi_hat_mq(kernel, t - kTwoPi * (kd + 1.0));
  }
  return sum;
}

}  // namespace

double symbol_gaussian(const RadialKernel& kernel, double xi) {
  if (!kernel.is_gaussian())
    throw Error(ErrorCode::kParameter, "symbol_gaussian needs a Gaussian kernel");
  return gaussian_spatial_sum(kernel.parameter(), xi, gaussian_truncation(kernel.parameter()));
}

double symbol_mq(const RadialKernel& kernel, double xi) {
  if (!kernel.is_multiquadric())
    throw Error(ErrorCode::kParameter, "symbol_mq needs a multiquadric kernel");
  return mq_lattice_sum(kernel, xi, multiquadric_truncation(kernel.parameter()));
}

double symbol(const RadialKernel& kernel, double xi) {
  return kernel.is_gaussian() ? symbol_gaussian(kernel, xi) : symbol_mq(kernel, xi);
}

SymbolFunction::SymbolFunction(RadialKernel kernel)
    : kernel_(kernel),
      truncation_(kernel.is_gaussian() ? gaussian_truncation(kernel.parameter())
                                       : multiquadric_truncation(kernel.parameter())) {}

double SymbolFunction::operator()(double xi) const { return evaluate_with(xi, truncation_); }

double SymbolFunction::evaluate_with(double xi, int truncation) const {
  if (kernel_.is_gaussian()) return gaussian_spatial_sum(kernel_.parameter(), xi, truncation);
  return mq_lattice_sum(kernel_, xi, truncation);
}

}  // namespace toepcg
