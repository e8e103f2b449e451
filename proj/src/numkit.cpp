#include "toepcg/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>

#include "toepcg/error.hpp"

namespace toepcg {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kPole: return "pole error";
    case ErrorCode::kShape: return "shape error";
    case ErrorCode::kSize: return "size error";
    case ErrorCode::kSingular: return "singular matrix";
    case ErrorCode::kNotSymmetric: return "matrix not symmetric";
    case ErrorCode::kParameter: return "parameter error";
    case ErrorCode::kPositivity: return "positivity error";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kIndefinite: return "indefinite operator";
    case ErrorCode::kBreakdown: return "breakdown";
    case ErrorCode::kIo: return "I/O error";
  }
  return "error";
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kShape, "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) {
  // Scaled accumulation; history norms in the multiquadric runs span 1e-15..1e5.
  double scale = 0.0;
  double ssq = 1.0;
  for (double v : x) {
    if (v == 0.0) continue;
    const double a = std::abs(v);
    if (scale < a) {
      ssq = 1.0 + ssq * (scale / a) * (scale / a);
      scale = a;
    } else {
      ssq += (a / scale) * (a / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------------------

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector DenseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) throw Error(ErrorCode::kShape, "matrix-vector length mismatch");
  Vector y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* r = data_.data() + i * cols_;
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

DenseMatrix DenseMatrix::multiply(const DenseMatrix& other) const {
  if (cols_ != other.rows_) throw Error(ErrorCode::kShape, "matrix-matrix shape mismatch");
  DenseMatrix out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      const double* b = other.data_.data() + k * other.cols_;
      double* o = out.data_.data() + i * other.cols_;
      for (std::size_t j = 0; j < other.cols_; ++j) o[j] += a * b[j];
    }
  }
  return out;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool DenseMatrix::is_symmetric(double tol) const {
  if (!square()) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
  return true;
}

double DenseMatrix::frobenius_norm() const { return norm2(data_); }

// ---------------------------------------------------------------------------
// FFT

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

ComplexBuffer::ComplexBuffer(std::size_t length) : values_(length) {
  if (!is_power_of_two(length))
    throw Error(ErrorCode::kShape, "FFT buffer length must be a power of two");
}

ComplexBuffer::ComplexBuffer(std::vector<Complex> values) : values_(std::move(values)) {
  if (!is_power_of_two(values_.size()))
    throw Error(ErrorCode::kShape, "FFT buffer length must be a power of two");
}

FftPlan::FftPlan(std::size_t length) : length_(length), bitrev_(length) {
  if (!is_power_of_two(length))
    throw Error(ErrorCode::kShape, "FFT length must be a power of two");
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < length) ++bits;
  for (std::size_t i = 0; i < length; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    bitrev_[i] = r;
  }
  // Twiddles from direct sin/cos; a running product drifts at L = 2^18.
  twiddles_.resize(length / 2);
  for (std::size_t k = 0; k < length / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(length);
    twiddles_[k] = Complex(std::cos(angle), std::sin(angle));
  }
}

void FftPlan::execute(std::span<Complex> data, FftDirection direction) const {
  if (data.size() != length_) throw Error(ErrorCode::kShape, "FFT plan length mismatch");
  const std::size_t n = length_;
  for (std::size_t i = 0; i < n; ++i)
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);

  const bool inverse = direction == FftDirection::kInverse;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        Complex w = twiddles_[k * step];
        if (inverse) w = std::conj(w);
        const Complex u = data[start + k];
        const Complex v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : data) v *= scale;
  }
}

void FftPlan::execute_strided(Complex* data, std::size_t stride, FftDirection direction,
                              std::span<Complex> scratch) const {
  if (stride == 1) {
    execute({data, length_}, direction);
    return;
  }
  if (scratch.size() < length_) throw Error(ErrorCode::kShape, "FFT scratch too small");
  for (std::size_t i = 0; i < length_; ++i) scratch[i] = data[i * stride];
  execute(scratch.first(length_), direction);
  for (std::size_t i = 0; i < length_; ++i) data[i * stride] = scratch[i];
}

ComplexBuffer fft(ComplexBuffer buf, FftDirection direction) {
  FftPlan(buf.size()).execute(buf.values(), direction);
  return buf;
}

// ---------------------------------------------------------------------------
// LU

LuDecomposition::LuDecomposition(DenseMatrix a) : lu_(std::move(a)) {
  if (!lu_.square()) throw Error(ErrorCode::kShape, "LU requires a square matrix");
  const std::size_t n = lu_.rows();
  perm_.resize(n);
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        pivot = i;
      }
    }
    if (best == 0.0 || !std::isfinite(best))
      throw Error(ErrorCode::kSingular, "zero pivot in column " + std::to_string(k));
    if (pivot != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(pivot).begin());
      std::swap(perm_[k], perm_[pivot]);
    }
    const double inv = 1.0 / lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu_(i, k) * inv;
      lu_(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
}

Vector LuDecomposition::solve(std::span<const double> b) const {
  const std::size_t n = size();
  if (b.size() != n) throw Error(ErrorCode::kShape, "LU solve length mismatch");
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
    x[i] = s / lu_(i, i);
  }
  return x;
}

DenseMatrix LuDecomposition::inverse() const {
  const std::size_t n = size();
  DenseMatrix inv(n, n);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Vector col = solve(e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  return inv;
}

Vector lu_solve(const DenseMatrix& a, std::span<const double> b) {
  return LuDecomposition(a).solve(b);
}

// ---------------------------------------------------------------------------
// Jacobi

EigenDecomposition jacobi_eigs(const DenseMatrix& input) {
  if (!input.is_symmetric())
    throw Error(ErrorCode::kNotSymmetric, "Jacobi eigensolver needs a symmetric matrix");
  const std::size_t n = input.rows();
  DenseMatrix a = input;
  DenseMatrix v = DenseMatrix::identity(n);

  const double target = 1e-13 * std::max(input.frobenius_norm(), 1e-300);
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && off_norm() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rutishauser's form: t = sgn(theta) / (|theta| + sqrt(theta^2 + 1)).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k != p && k != q) {
            const double akp = a(k, p);
            const double akq = a(k, q);
            a(k, p) = akp - s * (akq + tau * akp);
            a(p, k) = a(k, p);
            a(k, q) = akq + s * (akp - tau * akq);
            a(q, k) = a(k, q);
          }
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = vkp - s * (vkq + tau * vkp);
          v(k, q) = vkq + s * (vkp - tau * vkq);
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomposition out{Vector(n), DenseMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// RNG

std::uint64_t Rng::next_u64() noexcept {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::next_unit() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

Vector uniform_vector(Rng& rng, std::size_t length) {
  Vector v(length);
  for (auto& x : v) x = 2.0 * rng.next_unit() - 1.0;
  return v;
}

}  // namespace toepcg
