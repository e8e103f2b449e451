#pragma once

// Symmetric multilevel Toeplitz operators (phi(||j - k||)) on the grid
// [-n, n]^d, applied in O(N log N) through circulant embedding, and the
// banded Toeplitz matrices that serve as preconditioners.

#include <cstddef>
#include <span>
#include <vector>

#include "toepcg/kernels.hpp"
#include "toepcg/linear_operator.hpp"
#include "toepcg/numkit.hpp"

namespace toepcg {

/// Complex elements allowed in a circulant embedding (512 MiB).
inline constexpr std::size_t kDefaultEmbeddingBudget = std::size_t{1} << 25;
/// Entries allowed in a dense materialization (128 MiB).
inline constexpr std::size_t kDefaultDenseBudget = std::size_t{1} << 24;

class SymToeplitz {
 public:
  /// Operator on [-n, n]^d; side length 2n + 1 per axis.
  static SymToeplitz from_kernel(const RadialKernel& kernel, std::size_t n, std::size_t dim,
                                 std::size_t budget = kDefaultEmbeddingBudget);

  /// Operator with an arbitrary side length per axis (even lengths included).
  static SymToeplitz from_kernel_side(const RadialKernel& kernel, std::size_t side,
                                      std::size_t dim,
                                      std::size_t budget = kDefaultEmbeddingBudget);

  /// Generator t_k over [0, side)^d, last axis fastest. Evenness in each
  /// coordinate is implied.
  static SymToeplitz from_generator(std::vector<double> generator, std::size_t side,
                                    std::size_t dim,
                                    std::size_t budget = kDefaultEmbeddingBudget);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t side() const noexcept { return side_; }
  /// n for side 2n + 1 (side / 2 rounded down otherwise).
  std::size_t halfwidth() const noexcept { return side_ / 2; }
  /// Vector length side^d.
  std::size_t size() const noexcept { return size_; }
  std::size_t embedding_side() const noexcept { return padded_; }

  std::span<const double> generator() const noexcept { return generator_; }
  /// Entry t at per-axis offsets |j_a - k_a|.
  double entry(std::span<const std::size_t> offsets) const;

  Vector matvec(std::span<const double> x) const;
  void matvec(std::span<const double> x, std::span<double> y) const;

  DenseMatrix to_dense(std::size_t budget = kDefaultDenseBudget) const;
  LinearOperator as_operator() const;

 private:
  SymToeplitz(std::vector<double> generator, std::size_t side, std::size_t dim,
              std::size_t budget);

  void transform(std::span<Complex> data, FftDirection direction) const;

  std::size_t dim_;
  std::size_t side_;
  std::size_t size_;
  std::size_t padded_;
  std::vector<double> generator_;
  double generator_l1_;
  FftPlan plan_;
  std::vector<Complex> spectrum_;  // FFT of the embedded generator
};

/// Even coefficient sequence c_{-j} = c_j, j = 0..m, and its banded
/// Toeplitz matrix of any size.
class BandedSymbol {
 public:
  explicit BandedSymbol(std::vector<double> coeffs);

  std::size_t halfband() const noexcept { return coeffs_.size() - 1; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double operator[](std::size_t j) const { return coeffs_[j]; }

  /// c_0 + 2 sum_j c_j cos(j xi).
  double symbol_eval(double xi) const;
  /// c_0 + 2 sum_j c_j, the symbol at xi = 0.
  double symbol_at_zero() const;

  Vector matvec(std::span<const double> x) const;
  void matvec(std::span<const double> x, std::span<double> y) const;

  DenseMatrix to_dense(std::size_t length, std::size_t budget = kDefaultDenseBudget) const;
  LinearOperator as_operator(std::size_t length) const;

 private:
  std::vector<double> coeffs_;
};

inline Vector banded_matvec(const BandedSymbol& sym, std::span<const double> x) {
  return sym.matvec(x);
}
inline double symbol_eval(const BandedSymbol& sym, double xi) { return sym.symbol_eval(xi); }

}  // namespace toepcg
