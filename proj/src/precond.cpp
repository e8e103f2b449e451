#include "toepcg/precond.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "toepcg/error.hpp"

namespace toepcg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

PrecondStencil build_stencil(const RadialKernel& kernel, std::size_t n, std::size_t m,
                             const BuildOptions& options) {
  if (m == 0) throw Error(ErrorCode::kParameter, "stencil half-band m must be at least 1");
  if (m > n) throw Error(ErrorCode::kParameter, "stencil half-band m exceeds section half-width n");
  if (n > kMaxSectionHalfwidth)
    throw Error(ErrorCode::kSize, "section half-width above " + std::to_string(kMaxSectionHalfwidth));

  const DenseMatrix section = SymToeplitz::from_kernel(kernel, n, 1).to_dense();
  Vector e0(2 * n + 1, 0.0);
  e0[n] = 1.0;
  const Vector column = lu_solve(section, e0);

  std::vector<double> c(column.begin() + static_cast<std::ptrdiff_t>(n),
                        column.begin() + static_cast<std::ptrdiff_t>(n + m + 1));

  if (kernel.is_gaussian()) {
    PrecondStencil out{kernel, n, BandedSymbol(std::move(c)), false, false};
    const SymbolMinimum lo = verify_positivity(out.coeffs, options.positivity_grid);
    if (!(lo.min > 0.0))
      throw Error(ErrorCode::kPositivity,
                  "Gaussian stencil symbol reaches " + g17(lo.min) + " at xi = " + g17(lo.argmin) +
                      "; increase m or n");
    return out;
  }

  // Multiquadric: c_j = -(A_n^{-1})_{j0}, then remove the mean of the
  // extended sequence (c_{-m}..c_m) so that sum d_j = 0.
  for (auto& v : c) v = -v;
  double total = c[0];
  for (std::size_t j = 1; j <= m; ++j) total += 2.0 * c[j];
  const double mean = total / static_cast<double>(2 * m + 1);
  for (auto& v : c) v -= mean;
  // Centre tap absorbs the rounding left by the subtraction.
  double wings = 0.0;
  for (std::size_t j = m; j >= 1; --j) wings += c[j];
  c[0] = -2.0 * wings;

  if (std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; }))
    throw Error(ErrorCode::kDegenerate, "zero-sum stencil vanishes identically");

  PrecondStencil out{kernel, n, BandedSymbol(c), true, false};
  const double at_pi = out.coeffs.symbol_eval(std::numbers::pi);
  if (at_pi == 0.0) throw Error(ErrorCode::kDegenerate, "stencil symbol vanishes at pi");
  if (at_pi < 0.0) {
    for (auto& v : c) v = -v;
    out.coeffs = BandedSymbol(std::move(c));
    out.sign_flipped = true;
  }

  double scale = 0.0;
  for (double v : out.coeffs.coeffs()) scale += std::abs(v);
  const SymbolMinimum lo = verify_positivity(out.coeffs, options.positivity_grid);
  if (lo.min < -1e-12 * std::max(1.0, scale))
    throw Error(ErrorCode::kPositivity,
                "zero-sum stencil symbol is not one-signed (min " + g17(lo.min) + " at xi = " +
                    g17(lo.argmin) + "); increase n");
  return out;
}

double system_sign(const PrecondStencil& stencil) {
  const double s = stencil.coeffs.symbol_eval(std::numbers::pi) * symbol(stencil.kernel, std::numbers::pi);
  return s < 0.0 ? -1.0 : 1.0;
}

SymbolMinimum verify_positivity(const BandedSymbol& sym, std::size_t gridsize) {
  if (gridsize < 4 * (sym.halfband() + 1))
    throw Error(ErrorCode::kParameter, "positivity grid must have at least 4(m+1) points");
  SymbolMinimum best{sym.symbol_eval(0.0), 0.0};
  for (std::size_t i = 1; i < gridsize; ++i) {
    const double xi = kTwoPi * static_cast<double>(i) / static_cast<double>(gridsize);
    const double v = sym.symbol_eval(xi);
    if (v < best.min) best = {v, xi};
  }
  return best;
}

// ---------------------------------------------------------------------------

ProjectedPreconditioner::ProjectedPreconditioner(BandedSymbol band, std::size_t length)
    : band_(std::move(band)), length_(length), de_(length), e_de_(0.0) {
  if (length == 0) throw Error(ErrorCode::kParameter, "projected preconditioner needs length >= 1");
  const Vector ones(length, 1.0);
  band_.matvec(ones, de_);
  for (double v : de_) e_de_ += v;
  if (!(std::abs(e_de_) > 0.0) || !std::isfinite(e_de_))
    throw Error(ErrorCode::kDegenerate, "e^T D e = 0; rank-one correction undefined");
}

void ProjectedPreconditioner::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != length_ || y.size() != length_)
    throw Error(ErrorCode::kShape, "projected preconditioner length mismatch");
  band_.matvec(x, y);
  double edx = 0.0;
  for (double v : y) edx += v;
  const double f = edx / e_de_;
  for (std::size_t i = 0; i < length_; ++i) y[i] -= f * de_[i];
}

Vector ProjectedPreconditioner::apply(std::span<const double> x) const {
  Vector y(length_);
  apply(x, y);
  return y;
}

LinearOperator ProjectedPreconditioner::as_operator() const {
  return {length_, [pc = *this](std::span<const double> x, std::span<double> y) { pc.apply(x, y); }};
}

ProjectedPreconditioner make_projected(const PrecondStencil& stencil, std::size_t length) {
  if (!stencil.zero_sum)
    throw Error(ErrorCode::kParameter, "projected preconditioner needs a zero-sum stencil");
  return ProjectedPreconditioner(stencil.coeffs, length);
}

LinearOperator make_preconditioner(const PrecondStencil& stencil, std::size_t length) {
  if (stencil.zero_sum) return make_projected(stencil, length).as_operator();
  return stencil.coeffs.as_operator(length);
}

// ---------------------------------------------------------------------------

std::vector<SweepEntry> lemma21_sweep(const RadialKernel& kernel, std::span<const std::size_t> ms,
                                      std::span<const std::size_t> ns, std::size_t gridsize) {
  if (!kernel.is_gaussian()) throw Error(ErrorCode::kParameter, "lemma21_sweep is for the Gaussian");
  if (gridsize == 0) throw Error(ErrorCode::kParameter, "sweep grid must be nonempty");
  const SymbolFunction sigma(kernel);
  std::vector<double> sigma_grid(gridsize);
  for (std::size_t i = 0; i < gridsize; ++i)
    sigma_grid[i] = sigma(kTwoPi * static_cast<double>(i) / static_cast<double>(gridsize));

  std::vector<SweepEntry> out;
  for (std::size_t n : ns) {
    for (std::size_t m : ms) {
      if (m > n) throw Error(ErrorCode::kParameter, "sweep needs m <= n");
      const PrecondStencil st = build_stencil(kernel, n, m);
      double sup = 0.0;
      for (std::size_t i = 0; i < gridsize; ++i) {
        const double xi = kTwoPi * static_cast<double>(i) / static_cast<double>(gridsize);
        sup = std::max(sup, std::abs(sigma_grid[i] * st.coeffs.symbol_eval(xi) - 1.0));
      }
      out.push_back({m, n, sup});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string stencil_to_json(const PrecondStencil& stencil) {
  std::ostringstream os;
  os << "{\"kernel\": \"" << stencil.kernel.name() << "\", \""
     << (stencil.kernel.is_gaussian() ? "lambda" : "c") << "\": " << g17(stencil.kernel.parameter())
     << ", \"n\": " << stencil.section_halfwidth << ", \"m\": " << stencil.halfband()
     << ", \"coeffs\": [";
  const auto coeffs = stencil.coeffs.coeffs();
  for (std::size_t j = 0; j < coeffs.size(); ++j) os << (j ? ", " : "") << g17(coeffs[j]);
  os << "], \"zero_sum\": " << (stencil.zero_sum ? "true" : "false")
     << ", \"sign_flipped\": " << (stencil.sign_flipped ? "true" : "false") << "}\n";
  return os.str();
}

PrecondStencil stencil_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const std::string kind = j.at("kernel").get<std::string>();
    RadialKernel kernel = kind == "gaussian" ? RadialKernel::gaussian(j.at("lambda").get<double>())
                          : kind == "multiquadric"
                              ? RadialKernel::multiquadric(j.at("c").get<double>())
                              : throw Error(ErrorCode::kParameter, "unknown kernel '" + kind + "'");
    auto coeffs = j.at("coeffs").get<std::vector<double>>();
    const auto m = j.at("m").get<std::size_t>();
    if (coeffs.size() != m + 1) throw Error(ErrorCode::kShape, "stencil coeffs length != m + 1");
    return PrecondStencil{kernel, j.at("n").get<std::size_t>(), BandedSymbol(std::move(coeffs)),
                          j.at("zero_sum").get<bool>(), j.at("sign_flipped").get<bool>()};
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kIo, std::string("malformed stencil JSON: ") + ex.what());
  }
}

}  // namespace toepcg
