#pragma once

#include <string>

namespace toepcg {

enum class KernelKind { kGaussian, kMultiquadric };

/// Generating function of the interpolation matrix: exp(-lambda r^2) or
/// sqrt(r^2 + c^2). Distances are in grid-spacing units.
class RadialKernel {
 public:
  static RadialKernel gaussian(double lambda = 1.0);
  static RadialKernel multiquadric(double c = 1.0);

  KernelKind kind() const noexcept { return kind_; }
  bool is_gaussian() const noexcept { return kind_ == KernelKind::kGaussian; }
  bool is_multiquadric() const noexcept { return kind_ == KernelKind::kMultiquadric; }

  /// lambda for the Gaussian, c for the multiquadric.
  double parameter() const noexcept { return param_; }

  std::string name() const;
  std::string describe() const;  // e.g. "gaussian(lambda=1)"

  /// phi(r); r must be nonnegative.
  double operator()(double r) const;

 private:
  RadialKernel(KernelKind kind, double param) : kind_(kind), param_(param) {}
  KernelKind kind_;
  double param_;
};

double phi(const RadialKernel& kernel, double r);

/// Modified Bessel function of the second kind, order one, for x > 0.
double bessel_k1(double x);

/// Generalized Fourier transform -(2c/|xi|) K1(c|xi|) of the multiquadric,
/// under phi_hat(xi) = integral phi(x) exp(-i xi x) dx. c = 0 gives -2/xi^2.
double phi_hat_mq(const RadialKernel& kernel, double xi);

/// sqrt(pi/lambda) exp(-xi^2 / (4 lambda)).
double phi_hat_gaussian(const RadialKernel& kernel, double xi);

/// Theta-function symbol sum_j exp(-lambda j^2) cos(j xi), summed in space.
double symbol_gaussian(const RadialKernel& kernel, double xi);

/// Periodized transform sum_k phi_hat(xi + 2 pi k). Negative on (0, 2 pi)
/// with a double pole on 2 pi Z.
double symbol_mq(const RadialKernel& kernel, double xi);

/// Lattice-sum symbol of either kernel with its truncation chosen up front.
class SymbolFunction {
 public:
  explicit SymbolFunction(RadialKernel kernel);

  const RadialKernel& kernel() const noexcept { return kernel_; }
  /// Half-width K of the truncated lattice sum.
  int truncation() const noexcept { return truncation_; }

  double operator()(double xi) const;

  /// Same sum with an explicit half-width, for truncation studies.
  double evaluate_with(double xi, int truncation) const;

 private:
  RadialKernel kernel_;
  int truncation_;
};

int gaussian_truncation(double lambda);
/// Smallest K whose analytic tail bound for the multiquadric sum is below 1e-12.
int multiquadric_truncation(double c);

double symbol(const RadialKernel& kernel, double xi);

}  // namespace toepcg
