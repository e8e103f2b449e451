#pragma once

// Small self-contained numerical toolkit: dense matrices, radix-2 FFT,
// pivoted LU, cyclic Jacobi eigensolver and a seeded RNG.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace toepcg {

using Vector = std::vector<double>;
using Complex = std::complex<double>;

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double norm_inf(std::span<const double> x);

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }

  Vector multiply(std::span<const double> x) const;
  DenseMatrix multiply(const DenseMatrix& other) const;
  DenseMatrix transpose() const;

  bool is_symmetric(double tol = 0.0) const;
  double frobenius_norm() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// FFT

enum class FftDirection { kForward, kInverse };

bool is_power_of_two(std::size_t n) noexcept;
std::size_t next_power_of_two(std::size_t n) noexcept;

/// Complex array whose length is a power of two.
class ComplexBuffer {
 public:
  explicit ComplexBuffer(std::size_t length);
  explicit ComplexBuffer(std::vector<Complex> values);

  std::size_t size() const noexcept { return values_.size(); }
  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }
  std::span<Complex> values() noexcept { return values_; }
  std::span<const Complex> values() const noexcept { return values_; }

 private:
  std::vector<Complex> values_;
};

/// Precomputed bit-reversal table and twiddles for one transform length.
/// Forward: X_k = sum_j x_j exp(-2 pi i jk / L). Inverse is scaled by 1/L.
class FftPlan {
 public:
  explicit FftPlan(std::size_t length);

  std::size_t size() const noexcept { return length_; }

  /// In-place transform of a contiguous run of `size()` values.
  void execute(std::span<Complex> data, FftDirection direction) const;

  /// In-place transform of `size()` values spaced `stride` apart.
  void execute_strided(Complex* data, std::size_t stride, FftDirection direction,
                       std::span<Complex> scratch) const;

 private:
  std::size_t length_;
  std::vector<std::size_t> bitrev_;
  std::vector<Complex> twiddles_;  // exp(-2 pi i k / L), k < L/2
};

ComplexBuffer fft(ComplexBuffer buf, FftDirection direction);

// ---------------------------------------------------------------------------
// Dense solvers

/// LU factorization with partial pivoting, PA = LU.
class LuDecomposition {
 public:
  explicit LuDecomposition(DenseMatrix a);

  std::size_t size() const noexcept { return lu_.rows(); }
  Vector solve(std::span<const double> b) const;
  DenseMatrix inverse() const;

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
};

Vector lu_solve(const DenseMatrix& a, std::span<const double> b);

struct EigenDecomposition {
  Vector eigenvalues;        // ascending
  DenseMatrix eigenvectors;  // column k belongs to eigenvalues[k]
};

/// Cyclic Jacobi rotations; input must be exactly symmetric.
EigenDecomposition jacobi_eigs(const DenseMatrix& a);

// ---------------------------------------------------------------------------
// Random numbers

/// SplitMix64: state += 0x9E3779B97F4A7C15, output is the state mixed by
/// (z ^ z>>30) * 0xBF58476D1CE4E5B9, (z ^ z>>27) * 0x94D049BB133111EB, z ^ z>>31.
/// Doubles use the top 53 bits, so streams are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1).
  double next_unit() noexcept;

 private:
  std::uint64_t state_;
};

/// Entries uniform on [-1, 1).
Vector uniform_vector(Rng& rng, std::size_t length);

}  // namespace toepcg
