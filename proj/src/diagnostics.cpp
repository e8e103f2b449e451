#include "toepcg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "toepcg/error.hpp"
#include "toepcg/toeplitz.hpp"

namespace toepcg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPoleExclusion = 1e-3;
constexpr double kEtaMargin = 0.1;

DenseMatrix symmetrized(const DenseMatrix& m) {
  DenseMatrix s = m;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

DenseMatrix dense_preconditioner(const PrecondStencil& stencil, std::size_t length) {
  DenseMatrix d = stencil.coeffs.to_dense(length);
  if (!stencil.zero_sum) return d;
  const Vector de = d.multiply(Vector(length, 1.0));
  double e_de = 0.0;
  for (double v : de) e_de += v;
  if (e_de == 0.0) throw Error(ErrorCode::kDegenerate, "e^T D e = 0");
  for (std::size_t i = 0; i < length; ++i)
    for (std::size_t j = 0; j < length; ++j) d(i, j) -= de[i] * de[j] / e_de;
  return d;
}

}  // namespace

Vector SpectrumReport::plot_data() const {
  Vector out;
  const double cutoff = 1e-8 * std::abs(largest);
  for (double v : eigenvalues)
    if (std::abs(v) > cutoff) out.push_back(v);
  if (omitted_top && !out.empty()) out.pop_back();
  return out;
}

SpectrumReport spectrum_of_product(const DenseMatrix& a, const DenseMatrix& c) {
  if (!a.square() || !c.square() || a.rows() != c.rows())
    throw Error(ErrorCode::kShape, "spectrum: A and C must be square and of equal size");
  const std::size_t len = a.rows();

  const EigenDecomposition ce = jacobi_eigs(symmetrized(c));
  const double cmax = std::max(1.0, norm_inf(ce.eigenvalues));
  for (double lam : ce.eigenvalues)
    if (lam < -1e-10 * cmax)
      throw Error(ErrorCode::kPositivity, "preconditioner has a negative eigenvalue");

  // P = U diag(sqrt(max(lambda, 0))) U^T
  DenseMatrix us(len, len);
  for (std::size_t j = 0; j < len; ++j) {
    const double s = std::sqrt(std::max(ce.eigenvalues[j], 0.0));
    for (std::size_t i = 0; i < len; ++i) us(i, j) = ce.eigenvectors(i, j) * s;
  }
  const DenseMatrix p = symmetrized(us.multiply(ce.eigenvectors.transpose()));
  const DenseMatrix pap = symmetrized(p.multiply(symmetrized(a)).multiply(p));

  SpectrumReport report;
  report.eigenvalues = jacobi_eigs(pap).eigenvalues;
  report.largest = report.eigenvalues.empty() ? 0.0 : report.eigenvalues.back();
  const double cutoff = 1e-8 * std::abs(report.largest);
  std::size_t nonzero = 0, in1 = 0, in10 = 0;
  for (double v : report.eigenvalues) {
    if (std::abs(v) <= cutoff) {
      ++report.zero_count;
      continue;
    }
    ++nonzero;
    if (std::abs(v - 1.0) <= 0.01) ++in1;
    if (std::abs(v - 1.0) <= 0.1) ++in10;
  }
  if (nonzero > 0) {
    report.fraction_within_1pct = static_cast<double>(in1) / static_cast<double>(nonzero);
    report.fraction_within_10pct = static_cast<double>(in10) / static_cast<double>(nonzero);
  }
  return report;
}

SpectrumReport preconditioned_spectrum(const PrecondStencil& stencil, std::size_t n) {
  return preconditioned_spectrum_length(stencil, 2 * n + 1);
}

SpectrumReport preconditioned_spectrum_length(const PrecondStencil& stencil, std::size_t length) {
  DenseMatrix a = SymToeplitz::from_kernel_side(stencil.kernel, length, 1).to_dense();
  const double s = system_sign(stencil);
  if (s < 0.0)
    for (std::size_t i = 0; i < length; ++i)
      for (double& v : a.row(i)) v = -v;
  SpectrumReport report = spectrum_of_product(a, dense_preconditioner(stencil, length));
  report.omitted_top = stencil.kernel.is_multiquadric();
  return report;
}

SymbolProductScan symbol_product_scan(const PrecondStencil& stencil, std::size_t gridsize) {
  if (gridsize == 0) throw Error(ErrorCode::kParameter, "scan grid must be nonempty");
  const SymbolFunction sigma(stencil.kernel);
  const double s = system_sign(stencil);
  const bool mq = stencil.kernel.is_multiquadric();
  auto product = [&](double xi) { return s * stencil.coeffs.symbol_eval(xi) * sigma(xi); };

  SymbolProductScan scan{std::numeric_limits<double>::infinity(),
                         -std::numeric_limits<double>::infinity(), 0.0, true};
  for (std::size_t i = 0; i < gridsize; ++i) {
    const double xi = kTwoPi * static_cast<double>(i) / static_cast<double>(gridsize);
    if (mq && (xi < kPoleExclusion || xi > kTwoPi - kPoleExclusion)) continue;
    const double p = product(xi);
    scan.min = std::min(scan.min, p);
    scan.max = std::max(scan.max, p);
    scan.sup_deviation = std::max(scan.sup_deviation, std::abs(p - 1.0));
  }
  if (mq) {
    // Approach the double pole of sigma; a zero-sum stencil cancels it.
    const double reference = std::max({std::abs(scan.min), std::abs(scan.max), std::abs(product(kPoleExclusion))});
    for (double xi : {1e-4, 1e-5}) {
      const double p = product(xi);
      if (!std::isfinite(p) || std::abs(p) > 10.0 * reference) scan.bounded = false;
    }
  }
  return scan;
}

// ---------------------------------------------------------------------------

Complex ZeroSummingSequence::sum() const {
  Complex s(0.0, 0.0);
  for (const auto& v : coeffs) s += v;
  return s;
}

double ZeroSummingSequence::squared_norm() const {
  double s = 0.0;
  for (const auto& v : coeffs) s += std::norm(v);
  return s;
}

ZeroSummingSequence zero_summing_sequence(std::size_t n, double eta) {
  if (n == 0) throw Error(ErrorCode::kParameter, "zero-summing sequence needs n >= 1");
  // L_n(xi - eta) = n^{-1/2} sum_{k<n} e^{-i k eta} e^{i k xi}; multiplying by
  // (e^{i xi} - 1)/(2i) gives y_j = (a_{j-1} - a_j) / (2i) on 0..n.
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  auto a = [&](std::size_t k) -> Complex {
    if (k >= n) return {0.0, 0.0};
    return std::polar(scale, -static_cast<double>(k) * eta);
  };
  ZeroSummingSequence seq{n, eta, std::vector<Complex>(n + 1)};
  const Complex inv_2i(0.0, -0.5);
  seq.coeffs[0] = -a(0) * inv_2i;
  for (std::size_t j = 1; j <= n; ++j) seq.coeffs[j] = (a(j - 1) - a(j)) * inv_2i;
  return seq;
}

RayleighResult fejer_rayleigh(const RadialKernel& kernel, double eta, std::size_t n) {
  if (!kernel.is_multiquadric()) throw Error(ErrorCode::kParameter, "fejer_rayleigh is for the multiquadric");
  if (!(eta >= kEtaMargin && eta <= kTwoPi - kEtaMargin))
    throw Error(ErrorCode::kDomain, "eta must stay 0.1 away from the poles at 0 and 2 pi");
  const ZeroSummingSequence seq = zero_summing_sequence(n, eta);
  const std::size_t len = seq.coeffs.size();
  std::vector<double> phis(len);
  for (std::size_t k = 0; k < len; ++k) phis[k] = kernel(static_cast<double>(k));

  // sum_{j,k} y_j conj(y_k) phi(|j-k|); the form is Hermitian so only the real part survives.
  double form = 0.0;
  for (std::size_t j = 0; j < len; ++j) {
    form += std::norm(seq.coeffs[j]) * phis[0];
    for (std::size_t k = j + 1; k < len; ++k)
      form += 2.0 * (seq.coeffs[j] * std::conj(seq.coeffs[k])).real() * phis[k - j];
  }
  const double mass = seq.squared_norm();
  return {form / mass, mass};
}

}  // namespace toepcg
