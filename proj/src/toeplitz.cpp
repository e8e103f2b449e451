#include "toepcg/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "toepcg/error.hpp"

namespace toepcg {

namespace {

std::size_t checked_power(std::size_t base, std::size_t exponent, std::size_t budget,
                          const char* what) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    if (base != 0 && r > budget / base)
      throw Error(ErrorCode::kSize, std::string(what) + " exceeds the memory budget");
    r *= base;
  }
  if (r > budget) throw Error(ErrorCode::kSize, std::string(what) + " exceeds the memory budget");
  return r;
}

std::size_t integer_power(std::size_t base, std::size_t exponent) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exponent; ++i) r *= base;
  return r;
}

}  // namespace

SymToeplitz SymToeplitz::from_kernel(const RadialKernel& kernel, std::size_t n, std::size_t dim,
                                     std::size_t budget) {
  return from_kernel_side(kernel, 2 * n + 1, dim, budget);
}

SymToeplitz SymToeplitz::from_kernel_side(const RadialKernel& kernel, std::size_t side,
                                          std::size_t dim, std::size_t budget) {
  if (dim == 0 || side == 0) throw Error(ErrorCode::kParameter, "Toeplitz operator needs d, side >= 1");
  // Check the embedding size before allocating the generator.
  checked_power(next_power_of_two(2 * side - 1), dim, budget, "circulant embedding");
  const std::size_t count = integer_power(side, dim);
  std::vector<double> generator(count);
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t flat = 0; flat < count; ++flat) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < dim; ++a) r2 += static_cast<double>(idx[a] * idx[a]);
    generator[flat] = kernel(std::sqrt(r2));
    for (std::size_t a = dim; a-- > 0;) {
      if (++idx[a] < side) break;
      idx[a] = 0;
    }
  }
  return SymToeplitz(std::move(generator), side, dim, budget);
}

SymToeplitz SymToeplitz::from_generator(std::vector<double> generator, std::size_t side,
                                        std::size_t dim, std::size_t budget) {
  if (dim == 0 || side == 0) throw Error(ErrorCode::kParameter, "Toeplitz operator needs d, side >= 1");
  if (generator.size() != integer_power(side, dim))
    throw Error(ErrorCode::kShape, "generator length must be side^d");
  return SymToeplitz(std::move(generator), side, dim, budget);
}

SymToeplitz::SymToeplitz(std::vector<double> generator, std::size_t side, std::size_t dim,
                         std::size_t budget)
    : dim_(dim),
      side_(side),
      size_(integer_power(side, dim)),
      padded_(next_power_of_two(2 * side - 1)),
      generator_(std::move(generator)),
      generator_l1_(0.0),
      plan_(padded_) {
  const std::size_t total = checked_power(padded_, dim_, budget, "circulant embedding");
  for (double t : generator_) generator_l1_ += std::abs(t);

  // Circulant first column: per axis, offset k in [0, side) maps to t_k and
  // wraps P - k to t_k for k in [1, side); everything else is zero padding.
  spectrum_.assign(total, Complex(0.0, 0.0));
  std::vector<std::size_t> idx(dim_, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    bool inside = true;
    std::size_t gflat = 0;
    for (std::size_t a = 0; a < dim_; ++a) {
      std::size_t k = idx[a];
      if (k >= side_) {
        if (padded_ - k < side_) {
          k = padded_ - k;
        } else {
          inside = false;
          break;
        }
      }
      gflat = gflat * side_ + k;
    }
    if (inside) spectrum_[flat] = generator_[gflat];
    for (std::size_t a = dim_; a-- > 0;) {
      if (++idx[a] < padded_) break;
      idx[a] = 0;
    }
  }
  transform(spectrum_, FftDirection::kForward);
}

void SymToeplitz::transform(std::span<Complex> data, FftDirection direction) const {
  const std::size_t total = data.size();
  std::vector<Complex> scratch(padded_);
  // Axis a has stride P^(d-1-a); lines are enumerated by their base offset.
  std::size_t stride = 1;
  for (std::size_t a = dim_; a-- > 0;) {
    const std::size_t block = stride * padded_;
    for (std::size_t outer = 0; outer < total; outer += block)
      for (std::size_t inner = 0; inner < stride; ++inner)
        plan_.execute_strided(data.data() + outer + inner, stride, direction, scratch);
    stride = block;
  }
}

double SymToeplitz::entry(std::span<const std::size_t> offsets) const {
  if (offsets.size() != dim_) throw Error(ErrorCode::kShape, "entry: wrong number of offsets");
  std::size_t flat = 0;
  for (std::size_t k : offsets) {
    if (k >= side_) return 0.0;
    flat = flat * side_ + k;
  }
  return generator_[flat];
}

Vector SymToeplitz::matvec(std::span<const double> x) const {
  Vector y(size_);
  matvec(x, y);
  return y;
}

void SymToeplitz::matvec(std::span<const double> x, std::span<double> y) const {
  if (x.size() != size_ || y.size() != size_)
    throw Error(ErrorCode::kShape, "Toeplitz matvec length mismatch: expected " +
                                       std::to_string(size_) + ", got " + std::to_string(x.size()));
  std::vector<Complex> work(spectrum_.size(), Complex(0.0, 0.0));

  // Scatter x into the low corner [0, side)^d of the padded grid.
  std::vector<std::size_t> idx(dim_, 0);
  for (std::size_t flat = 0; flat < size_; ++flat) {
    std::size_t pflat = 0;
    for (std::size_t a = 0; a < dim_; ++a) pflat = pflat * padded_ + idx[a];
    work[pflat] = x[flat];
    for (std::size_t a = dim_; a-- > 0;) {
      if (++idx[a] < side_) break;
      idx[a] = 0;
    }
  }

  transform(work, FftDirection::kForward);
  for (std::size_t i = 0; i < work.size(); ++i) work[i] *= spectrum_[i];
  transform(work, FftDirection::kInverse);

  const double residue_limit = 1e-11 * std::max(generator_l1_ * norm_inf(x), 1e-300);
  std::fill(idx.begin(), idx.end(), 0);
  for (std::size_t flat = 0; flat < size_; ++flat) {
    std::size_t pflat = 0;
    for (std::size_t a = 0; a < dim_; ++a) pflat = pflat * padded_ + idx[a];
    const Complex v = work[pflat];
    if (std::abs(v.imag()) > residue_limit)
      throw Error(ErrorCode::kBreakdown, "imaginary residue in circulant matvec");
    y[flat] = v.real();
    for (std::size_t a = dim_; a-- > 0;) {
      if (++idx[a] < side_) break;
      idx[a] = 0;
    }
  }
}

DenseMatrix SymToeplitz::to_dense(std::size_t budget) const {
  checked_power(size_, 2, budget, "dense Toeplitz section");
  DenseMatrix m(size_, size_);
  std::vector<std::size_t> row(dim_), col(dim_), offsets(dim_);
  for (std::size_t i = 0; i < size_; ++i) {
    std::size_t r = i;
    for (std::size_t a = dim_; a-- > 0;) {
      row[a] = r % side_;
      r /= side_;
    }
    for (std::size_t j = 0; j < size_; ++j) {
      std::size_t c = j;
      for (std::size_t a = dim_; a-- > 0;) {
        col[a] = c % side_;
        c /= side_;
      }
      for (std::size_t a = 0; a < dim_; ++a)
        offsets[a] = row[a] > col[a] ? row[a] - col[a] : col[a] - row[a];
      m(i, j) = entry(offsets);
    }
  }
  return m;
}

LinearOperator SymToeplitz::as_operator() const {
  // Shares the immutable operator; callers keep *this alive.
  return {size_, [this](std::span<const double> x, std::span<double> y) { matvec(x, y); }};
}

// ---------------------------------------------------------------------------

BandedSymbol::BandedSymbol(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw Error(ErrorCode::kParameter, "banded symbol needs c_0");
}

double BandedSymbol::symbol_eval(double xi) const {
  double s = 0.0;
  for (std::size_t j = coeffs_.size() - 1; j >= 1; --j)
    s += coeffs_[j] * std::cos(static_cast<double>(j) * xi);
  return coeffs_[0] + 2.0 * s;
}

double BandedSymbol::symbol_at_zero() const {
  double s = 0.0;
  for (std::size_t j = coeffs_.size() - 1; j >= 1; --j) s += coeffs_[j];
  return coeffs_[0] + 2.0 * s;
}

Vector BandedSymbol::matvec(std::span<const double> x) const {
  Vector y(x.size());
  matvec(x, y);
  return y;
}

void BandedSymbol::matvec(std::span<const double> x, std::span<double> y) const {
  if (x.size() != y.size()) throw Error(ErrorCode::kShape, "banded matvec length mismatch");
  const std::size_t len = x.size();
  const std::size_t m = halfband();
  for (std::size_t i = 0; i < len; ++i) {
    double s = coeffs_[0] * x[i];
    const std::size_t reach = std::min(m, std::max(i, len - 1 - i));
    for (std::size_t j = 1; j <= reach; ++j) {
      if (i >= j) s += coeffs_[j] * x[i - j];
      if (i + j < len) s += coeffs_[j] * x[i + j];
    }
    y[i] = s;
  }
}

DenseMatrix BandedSymbol::to_dense(std::size_t length, std::size_t budget) const {
  checked_power(length, 2, budget, "dense banded section");
  DenseMatrix m(length, length);
  const std::size_t band = halfband();
  for (std::size_t i = 0; i < length; ++i)
    for (std::size_t j = 0; j < length; ++j) {
      const std::size_t off = i > j ? i - j : j - i;
      if (off <= band) m(i, j) = coeffs_[off];
    }
  return m;
}

LinearOperator BandedSymbol::as_operator(std::size_t length) const {
  return {length, [sym = *this](std::span<const double> x, std::span<double> y) { sym.matvec(x, y); }};
}

}  // namespace toepcg
