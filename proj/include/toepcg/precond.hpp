#pragma once

// Banded Toeplitz preconditioners built from a small finite section of the
// interpolation matrix: the central column of its inverse approximates the
// Fourier coefficients of 1/sigma.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "toepcg/kernels.hpp"
#include "toepcg/linear_operator.hpp"
#include "toepcg/toeplitz.hpp"

namespace toepcg {

inline constexpr std::size_t kMaxSectionHalfwidth = 512;
inline constexpr std::size_t kDefaultPositivityGrid = 4096;

struct PrecondStencil {
  RadialKernel kernel;
  std::size_t section_halfwidth;  // n: the dense section is (2n+1) x (2n+1)
  BandedSymbol coeffs;            // (c_0..c_m) or, for the multiquadric, (d_0..d_m)
  bool zero_sum = false;          // c_0 + 2 sum c_j == 0
  bool sign_flipped = false;      // coefficients were negated to make symbol(pi) > 0

  std::size_t halfband() const noexcept { return coeffs.halfband(); }
};

struct BuildOptions {
  std::size_t positivity_grid = kDefaultPositivityGrid;
};

/// Solves A_n c = e^0 densely and keeps c_0..c_m. For the multiquadric the
/// column is negated, shifted to zero sum and sign-normalized.
PrecondStencil build_stencil(const RadialKernel& kernel, std::size_t n, std::size_t m,
                             const BuildOptions& options = {});

/// Sign s in {+1, -1} such that s * sigma_C * sigma > 0: the multiquadric
/// matrix is negative definite on the zero-sum subspace, so its systems are
/// solved as (-A) x + e (-y) = -b.
double system_sign(const PrecondStencil& stencil);

struct SymbolMinimum {
  double min;
  double argmin;
};

/// Minimum of the trigonometric polynomial over xi_i = 2 pi i / gridsize.
/// A sampling check, not a proof of positivity.
SymbolMinimum verify_positivity(const BandedSymbol& sym, std::size_t gridsize);

/// C = D - (De)(De)^T / e^T D e applied matrix-free; ker C = span{e}.
class ProjectedPreconditioner {
 public:
  ProjectedPreconditioner(BandedSymbol band, std::size_t length);

  std::size_t size() const noexcept { return length_; }
  const BandedSymbol& band() const noexcept { return band_; }
  std::span<const double> de() const noexcept { return de_; }
  double e_de() const noexcept { return e_de_; }

  void apply(std::span<const double> x, std::span<double> y) const;
  Vector apply(std::span<const double> x) const;

  LinearOperator as_operator() const;

 private:
  BandedSymbol band_;
  std::size_t length_;
  Vector de_;
  double e_de_;
};

/// Requires a zero-sum stencil. `length` is the vector length (2N + 1 for
/// the grid [-N, N]).
ProjectedPreconditioner make_projected(const PrecondStencil& stencil, std::size_t length);

/// Preconditioner for a system of the given vector length: the banded matrix
/// itself for the Gaussian, the rank-one-corrected one for zero-sum stencils.
LinearOperator make_preconditioner(const PrecondStencil& stencil, std::size_t length);

struct SweepEntry {
  std::size_t m;
  std::size_t n;
  double sup_error;  // max over the grid of |sigma * sigma_C - 1|
};

std::vector<SweepEntry> lemma21_sweep(const RadialKernel& kernel, std::span<const std::size_t> ms,
                                      std::span<const std::size_t> ns,
                                      std::size_t gridsize = 2048);

/// JSON {kernel, lambda|c, n, m, coeffs[], zero_sum, sign_flipped}, numbers
/// printed with 17 significant digits.
std::string stencil_to_json(const PrecondStencil& stencil);
PrecondStencil stencil_from_json(const std::string& text);

}  // namespace toepcg
