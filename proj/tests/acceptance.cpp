// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "toepcg/diagnostics.hpp"
#include "toepcg/error.hpp"
#include "toepcg/krylov.hpp"
#include "toepcg/precond.hpp"
#include "toepcg/toeplitz.hpp"

using namespace toepcg;

namespace {

constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& ex) {
    o = {false, std::string("exception: ") + ex.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_diff(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

Vector uniform_b(std::uint64_t seed, std::size_t len) {
  Rng rng(seed);
  return uniform_vector(rng, len);
}

struct Run {
  SolveReport report;
  double seconds;
};

// A_N on [-N, N] (or length 2N with even), stencil from the (n, m) section.
Run run_system(const RadialKernel& k, std::size_t big_n, Variant v, std::size_t m, const Vector& b,
               std::size_t max_iters = 1000, bool even = false) {
  const auto t0 = Clock::now();
  const SymToeplitz a = SymToeplitz::from_kernel_side(k, even ? 2 * big_n : 2 * big_n + 1, 1);
  SolveConfig cfg;
  cfg.max_iters = max_iters;
  cfg.variant = v;
  if (v == Variant::kPlain) return {cg(a.as_operator(), b, cfg), seconds_since(t0)};
  const PrecondStencil st = build_stencil(k, 64, m);
  cfg.operator_sign = system_sign(st);
  SolveReport r = solve(a.as_operator(), make_preconditioner(st, a.size()), b, cfg);
  return {std::move(r), seconds_since(t0)};
}

// Frequency-side Poisson sum for the Gaussian symbol.
double gaussian_symbol_series(double lambda, double xi) {
  double s = 0.0;
  for (int k = -50; k <= 50; ++k) {
    const double w = xi + 2.0 * kPi * k;
    s += std::sqrt(kPi / lambda) * std::exp(-w * w / (4.0 * lambda));
  }
  return s;
}

std::pair<Vector, double> bordered_solve(const DenseMatrix& a, const Vector& b) {
  const std::size_t n = a.rows();
  DenseMatrix k(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k(i, j) = a(i, j);
    k(i, n) = k(n, i) = 1.0;
  }
  Vector rhs(b);
  rhs.push_back(0.0);
  Vector sol = lu_solve(k, rhs);
  const double y = sol.back();
  sol.pop_back();
  return {sol, y};
}

}  // namespace

int main() {
  const auto gauss = RadialKernel::gaussian(1.0);
  const auto mq = RadialKernel::multiquadric(1.0);

  report(1, "Gaussian stencil (64, 9) vs printed coefficients", [&] {
    const double printed[] = {1.4301,     -5.9563e-1, 2.2265e-1,  -8.2083e-2, 3.0205e-2,
                              -1.1112e-2, 4.0880e-3,  -1.5039e-3, 5.5325e-4,  -2.0353e-4};
    const auto t0 = Clock::now();
    const PrecondStencil st = build_stencil(gauss, 64, 9);
    const double secs = seconds_since(t0);
    double worst = 0.0;
    for (std::size_t j = 0; j <= 9; ++j)
      worst = std::max(worst, std::abs(st.coeffs[j] - printed[j]) / std::abs(printed[j]));
    return Outcome{worst <= 5e-5 && secs < 1.0, fmt("max rel. deviation %.2e (limit 5e-5), %.3f s", worst, secs)};
  });

  report(2, "Gaussian PCG, N=32768, 5 seeds", [&] {
    std::size_t lo = 1000, hi = 0;
    double worst_res = 0.0, worst_secs = 0.0;
    bool ok = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Run r = run_system(gauss, 32768, Variant::kPreconditioned, 9, uniform_b(seed, 65537));
      ok = ok && r.report.converged();
      lo = std::min(lo, r.report.iterations);
      hi = std::max(hi, r.report.iterations);
      worst_res = std::max(worst_res, r.report.true_residual);
      worst_secs = std::max(worst_secs, r.seconds);
    }
    ok = ok && hi <= 8 && hi - lo <= 2 && worst_res < 1e-13 && worst_secs < 30.0;
    return Outcome{ok, fmt("iterations %zu..%zu (published 5), max rel. residual %.2e, max %.2f s per run", lo, hi,
                           worst_res, worst_secs)};
  });

  report(3, "Gaussian CG without preconditioner, N=32768", [&] {
    const Run r = run_system(gauss, 32768, Variant::kPlain, 9, uniform_b(1, 65537));
    const std::size_t it = r.report.iterations;
    return Outcome{r.report.converged() && it >= 30 && it <= 40, fmt("%zu iterations (published 34)", it)};
  });

  report(4, "Multiquadric projected PCG, m=9, N=2048 and 32768", [&] {
    const Run a = run_system(mq, 2048, Variant::kProjectedStable, 9, uniform_b(1, 4097));
    const Run b = run_system(mq, 32768, Variant::kProjectedStable, 9, uniform_b(1, 65537));
    const std::size_t ia = a.report.iterations, ib = b.report.iterations;
    const bool ok = a.report.converged() && b.report.converged() && ia <= 15 && ib <= 15 &&
                    (ia > ib ? ia - ib : ib - ia) <= 2;
    return Outcome{ok, fmt("%zu and %zu iterations (published 11 and 11), c=1", ia, ib)};
  });

  report(5, "Multiquadric m=1 vs m=9 at N=8192", [&] {
    const Vector b = uniform_b(1, 16385);
    const Run m1 = run_system(mq, 8192, Variant::kProjectedStable, 1, b);
    const Run m9 = run_system(mq, 8192, Variant::kProjectedStable, 9, b);
    const bool ok = m1.report.converged() && m9.report.converged() && m1.report.iterations > 3 * m9.report.iterations;
    return Outcome{ok, fmt("%zu vs %zu iterations (published 74 vs 11)", m1.report.iterations, m9.report.iterations)};
  });

  report(6, "Unstable vs stable projected PCG on squares, n=N=64, m=9", [&] {
    Vector b(129);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = static_cast<double>((i + 1) * (i + 1));
    const Run u = run_system(mq, 64, Variant::kProjectedUnstable, 9, b, 100);
    const Run s = run_system(mq, 64, Variant::kProjectedStable, 9, b, 1000);
    double drift = 0.0;
    for (const auto& row : u.report.history)
      if (row.iteration < 40) drift = std::max(drift, row.e_component);
    const bool detected = u.report.status == SolveStatus::kCyclingDetected || drift > 1e-6;
    double gap = 0.0;
    const bool enough = u.report.history.size() >= 4 && s.report.history.size() >= 4;
    for (std::size_t k = 0; enough && k < 4; ++k)
      gap = std::max(gap, std::abs(u.report.history[k].direction_norm - s.report.history[k].direction_norm) /
                              s.report.history[k].direction_norm);
    const bool ok = !u.report.converged() && drift > 1e-6 && detected && s.report.converged() && enough && gap <= 1e-4;
    return Outcome{ok, fmt("unstable: %s after %zu, e-drift %.2e before iteration 40; stable: %s in %zu; "
                           "first 4 direction norms within %.2e",
                           to_string(u.report.status).c_str(), u.report.iterations, drift,
                           to_string(s.report.status).c_str(), s.report.iterations, gap)};
  });

  report(7, "Dense oracle equivalence, all four variants, N <= 32, 20 instances", [&] {
    const PrecondStencil gst = build_stencil(gauss, 64, 9);
    const PrecondStencil mst = build_stencil(mq, 64, 9);
    double worst_g = 0.0, worst_s = 0.0, worst_ux = 0.0, worst_uy = 0.0;
    bool ok_g = true, ok_s = true;
    int u_matched = 0, u_breakdowns = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const std::size_t big_n = 4 + (seed * 7) % 29;
      const std::size_t len = 2 * big_n + 1;
      const Vector b = uniform_b(1000 + seed, len);

      const SymToeplitz ag = SymToeplitz::from_kernel(gauss, big_n, 1);
      const Vector xg = lu_solve(ag.to_dense(), b);
      const SolveReport r1 = cg(ag.as_operator(), b);
      const SolveReport r2 = pcg(ag.as_operator(), make_preconditioner(gst, len), b);
      ok_g = ok_g && r1.converged() && r2.converged();
      worst_g = std::max({worst_g, rel_diff(r1.solution, xg), rel_diff(r2.solution, xg)});

      const SymToeplitz am = SymToeplitz::from_kernel(mq, big_n, 1);
      const auto [xm, ym] = bordered_solve(am.to_dense(), b);
      SolveConfig cfg;
      cfg.operator_sign = system_sign(mst);
      const LinearOperator c = make_preconditioner(mst, len);
      auto gap = [&](const SolveReport& r) {
        return std::max(rel_diff(r.solution, xm), std::abs(r.multiplier.value_or(1e300) - ym) / std::abs(ym));
      };
      const SolveReport r3 = projected_pcg_stable(am.as_operator(), c, b, cfg);
      ok_s = ok_s && r3.converged() && r3.multiplier.has_value();
      worst_s = std::max(worst_s, gap(r3));
      try {
        const SolveReport r4 = projected_pcg_unstable(am.as_operator(), c, b, cfg);
        const double g = r4.converged() ? gap(r4) : 1e300;
        if (g < 1e-8) ++u_matched;
        if (r4.converged()) {
          worst_ux = std::max(worst_ux, rel_diff(r4.solution, xm));
          worst_uy = std::max(worst_uy, std::abs(*r4.multiplier - ym) / std::abs(ym));
        }
      } catch (const Error&) {
        ++u_breakdowns;
      }
    }
    const bool ok = ok_g && ok_s && worst_g < 1e-8 && worst_s < 1e-8 && u_matched == 20;
    return Outcome{ok, fmt("cg/pcg max rel. error %.2e; projected stable (x, y) %.2e; projected unstable matches "
                           "%d of 20 (%d breakdowns; converged runs reach x %.2e, y %.2e)",
                           worst_g, worst_s, u_matched, u_breakdowns, worst_ux, worst_uy)};
  });

  report(8, "FFT matvec vs dense, d in {1,2}, n in 1..8, 100 vectors", [&] {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (const auto& k : {gauss, mq}) {
      for (std::size_t d : {1u, 2u}) {
        for (std::size_t n = 1; n <= 8; ++n) {
          const SymToeplitz t = SymToeplitz::from_kernel(k, n, d);
          const std::size_t side = 2 * n + 1, len = t.size();
          DenseMatrix dense(len, len);
          for (std::size_t i = 0; i < len; ++i)
            for (std::size_t j = 0; j < len; ++j) {
              double r2 = 0.0;
              for (std::size_t a = 0, ii = i, jj = j; a < d; ++a, ii /= side, jj /= side) {
                const double diff = static_cast<double>(ii % side) - static_cast<double>(jj % side);
                r2 += diff * diff;
              }
              dense(i, j) = k(std::sqrt(r2));
            }
          Rng rng(31 * n + d);
          for (int rep = 0; rep < 100; ++rep) {
            const Vector x = uniform_vector(rng, len);
            worst = std::max(worst, rel_diff(t.matvec(x), dense.multiply(x)));
          }
        }
      }
    }
    const double secs = seconds_since(t0);
    return Outcome{worst < 1e-11 && secs < 10.0, fmt("max rel. error %.2e over 3200 products, %.2f s", worst, secs)};
  });

  report(9, "Gaussian stencil symbol: positivity and approximation", [&] {
    const PrecondStencil st = build_stencil(gauss, 64, 9);
    const SymbolMinimum mn = verify_positivity(st.coeffs, 4096);
    const SymbolProductScan scan = symbol_product_scan(st, 4096);
    const std::size_t ms[] = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    const std::size_t ns[] = {64};
    const auto sweep = lemma21_sweep(gauss, ms, ns, 4096);
    bool decreasing = true;
    for (std::size_t i = 1; i < sweep.size(); ++i) decreasing = decreasing && sweep[i].sup_error < sweep[i - 1].sup_error;
    return Outcome{mn.min > 0.0 && scan.sup_deviation < 0.01 && decreasing,
                   fmt("min %.4f, sup deviation %.2e (m=9) down from %.2e (m=1), %s", mn.min, scan.sup_deviation,
                       sweep.front().sup_error, decreasing ? "strictly decreasing" : "not monotone")};
  });

  report(10, "Gaussian eigenvalues inside the symbol range, n <= 16", [&] {
    const double s0 = gaussian_symbol_series(1.0, 0.0), spi = gaussian_symbol_series(1.0, kPi);
    const bool anchors = std::abs(s0 - 1.7726372) < 5e-8 && std::abs(spi - 0.3006258) < 5e-8;
    double lo = 1e300, hi = -1e300;
    for (std::size_t n = 1; n <= 16; ++n) {
      const auto eig = jacobi_eigs(SymToeplitz::from_kernel(gauss, n, 1).to_dense()).eigenvalues;
      lo = std::min(lo, eig.front());
      hi = std::max(hi, eig.back());
    }
    const bool inside = lo >= spi - 1e-8 && hi <= s0 + 1e-8;
    return Outcome{anchors && inside, fmt("eigenvalues in [%.7f, %.7f], symbol range [%.7f, %.7f]", lo, hi, spi, s0)};
  });

  report(11, "Fejer-Rayleigh quotient and Parseval, n=256", [&] {
    const std::size_t n = 256;
    const double sigma_pi = SymbolFunction(mq)(kPi);
    const RayleighResult r = fejer_rayleigh(mq, kPi, n);
    const double q_gap = std::abs(r.quotient - sigma_pi) / std::abs(sigma_pi);
    // (2 pi)^{-1} int sin^2(xi/2) K_n(xi - eta); the integrand is a trigonometric
    // polynomial of degree n + 1, so an equispaced rule with 4n points is exact.
    const std::size_t q = 4 * n;
    double integral = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      const double xi = 2.0 * kPi * (static_cast<double>(i) + 0.5) / static_cast<double>(q);
      const double t = xi - kPi;
      const double s = std::sin(t / 2.0);
      const double fejer = std::abs(s) < 1e-15 ? static_cast<double>(n)
                                                : std::pow(std::sin(static_cast<double>(n) * t / 2.0) / s, 2) / n;
      integral += std::pow(std::sin(xi / 2.0), 2) * fejer;
    }
    integral /= static_cast<double>(q);
    const double p_gap = std::abs(r.squared_norm - integral) / integral;
    const double limit_gap = std::abs(r.squared_norm - 1.0);
    return Outcome{q_gap < 0.02 && p_gap < 0.02 && limit_gap < 0.02,
                   fmt("quotient %.6f vs sigma(pi) %.6f (%.2f%%); sum |y|^2 = %.6f, integral %.6f, "
                       "sin^2(pi/2) = 1",
                       r.quotient, sigma_pi, 100.0 * q_gap, r.squared_norm, integral)};
  });

  report(12, "Spectrum clustering of C_64 A_64", [&] {
    const SpectrumReport g1 = preconditioned_spectrum(build_stencil(gauss, 64, 1), 64);
    const SpectrumReport g9 = preconditioned_spectrum(build_stencil(gauss, 64, 9), 64);
    const SpectrumReport m1 = preconditioned_spectrum(build_stencil(mq, 64, 1), 64);
    const SpectrumReport m9 = preconditioned_spectrum(build_stencil(mq, 64, 9), 64);
    const bool cluster = g9.fraction_within_10pct > g1.fraction_within_10pct &&
                         m9.fraction_within_10pct > m1.fraction_within_10pct;
    const bool largest = std::abs(m9.largest - 288.1872) <= 0.2 * 288.1872 &&
                         std::abs(m1.largest - 502.6097) <= 0.2 * 502.6097;
    return Outcome{cluster && largest,
                   fmt("fraction in [0.9, 1.1]: Gaussian %.3f (m=1) -> %.3f (m=9), multiquadric %.3f -> %.3f; "
                       "multiquadric largest %.4f (m=1, published 502.6097), %.4f (m=9, published 288.1872), c=1",
                       g1.fraction_within_10pct, g9.fraction_within_10pct, m1.fraction_within_10pct,
                       m9.fraction_within_10pct, m1.largest, m9.largest)};
  });

  std::printf("%s: %d failing criteria\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
