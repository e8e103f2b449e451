#pragma once

#include <cstddef>
#include <vector>

#include "toepcg/kernels.hpp"
#include "toepcg/numkit.hpp"
#include "toepcg/precond.hpp"

namespace toepcg {

struct SpectrumReport {
  Vector eigenvalues;  // ascending; zero eigenvalues of a singular C included
  double largest = 0.0;
  double fraction_within_1pct = 0.0;   // nonzero eigenvalues in [0.99, 1.01]
  double fraction_within_10pct = 0.0;  // nonzero eigenvalues in [0.9, 1.1]
  std::size_t zero_count = 0;          // |lambda| <= 1e-8 * |largest|
  bool omitted_top = false;            // plot data drops the largest eigenvalue

  /// Eigenvalues for plotting: nonzero ones, without the largest when omitted_top.
  Vector plot_data() const;
};

/// Nonzero spectrum of C A for symmetric A and positive semidefinite C,
/// computed as the spectrum of P A P with P = C^{1/2}.
SpectrumReport spectrum_of_product(const DenseMatrix& a, const DenseMatrix& c);

/// Spectrum of C_L A_L for vector length L = 2n + 1 (or `length` when given),
/// with A sign-normalized as in the solver. Multiquadric reports omit the
/// largest eigenvalue from plot data.
SpectrumReport preconditioned_spectrum(const PrecondStencil& stencil, std::size_t n);
SpectrumReport preconditioned_spectrum_length(const PrecondStencil& stencil, std::size_t length);

struct SymbolProductScan {
  double min;
  double max;
  double sup_deviation;  // max |s sigma_C sigma - 1|
  bool bounded;          // product stays finite approaching the pole (multiquadric)
};

/// Samples s * sigma_C(xi) * sigma(xi) on xi_i = 2 pi i / gridsize, with
/// s = system_sign(stencil). Multiquadric scans skip xi within 1e-3 of 2 pi Z.
SymbolProductScan symbol_product_scan(const PrecondStencil& stencil, std::size_t gridsize);

struct ZeroSummingSequence {
  std::size_t n;
  double eta;
  std::vector<Complex> coeffs;  // support 0..n

  Complex sum() const;
  double squared_norm() const;
};

/// Fourier coefficients of L_n(xi - eta) (e^{i xi} - 1) / (2i). The factor
/// has modulus |sin(xi / 2)|, so the squared modulus of the polynomial is
/// sin^2(xi/2) K_n(xi - eta) with K_n the Fejer kernel.
ZeroSummingSequence zero_summing_sequence(std::size_t n, double eta);

struct RayleighResult {
  double quotient;  // sum y_j conj(y_k) phi(j - k) / sum |y_j|^2
  double squared_norm;
};

/// Rayleigh quotient of the multiquadric matrix on the zero-summing sequence;
/// tends to sigma(eta) as n grows.
RayleighResult fejer_rayleigh(const RadialKernel& kernel, double eta, std::size_t n);

}  // namespace toepcg
