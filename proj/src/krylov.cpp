#include "toepcg/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "toepcg/error.hpp"

namespace toepcg {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kPlain: return "plain";
    case Variant::kPreconditioned: return "preconditioned";
    case Variant::kProjectedUnstable: return "projected_unstable";
    case Variant::kProjectedStable: return "projected_stable";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "plain") return Variant::kPlain;
  if (s == "preconditioned") return Variant::kPreconditioned;
  if (s == "projected_unstable") return Variant::kProjectedUnstable;
  if (s == "projected_stable") return Variant::kProjectedStable;
  throw Error(ErrorCode::kParameter, "unknown solver variant '" + s + "'");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxIters: return "max_iters";
    case SolveStatus::kCyclingDetected: return "cycling_detected";
  }
  return "?";
}

void project_q_inplace(std::span<double> x) {
  if (x.empty()) return;
  double s = 0.0;
  for (double v : x) s += v;
  const double mean = s / static_cast<double>(x.size());
  for (auto& v : x) v -= mean;
}

Vector project_q(std::span<const double> x) {
  Vector y(x.begin(), x.end());
  project_q_inplace(y);
  return y;
}

double recover_multiplier(const LinearOperator& a, std::span<const double> x,
                          std::span<const double> b) {
  if (b.size() != a.size()) throw Error(ErrorCode::kShape, "multiplier: length mismatch");
  const Vector ax = a(x);
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) s += b[i] - ax[i];
  return s / static_cast<double>(b.size());
}

namespace {

double e_component(std::span<const double> v, double norm) {
  if (norm == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return std::abs(s) / norm;
}

// Direction-norm rebound after the norm has once been small.
class CyclingMonitor {
 public:
  CyclingMonitor(double tol, double b_norm) : floor_(std::sqrt(tol) * b_norm) {}

  void observe(double direction_norm) {
    running_min_ = std::min(running_min_, direction_norm);
    if (running_min_ < floor_ && direction_norm > 1e3 * running_min_) triggered_ = true;
  }
  bool triggered() const noexcept { return triggered_; }

 private:
  double floor_;
  double running_min_ = std::numeric_limits<double>::infinity();
  bool triggered_ = false;
};

// One implementation of the xi/rho/delta recurrences:
//   a_k = rho^T C rho / delta^T A delta,  xi += a delta,  rho -= a A delta
//   b_k = rho+^T C rho+ / rho^T C rho,     delta = C rho+ + b_k delta
// with optional re-projection of rho onto the zero-sum subspace.
SolveReport run_recurrences(const LinearOperator& a_in, const LinearOperator* c_in,
                            std::span<const double> b_in, const SolveConfig& cfg, bool project,
                            bool saddle) {
  const std::size_t len = a_in.size();
  if (b_in.size() != len) throw Error(ErrorCode::kShape, "right-hand side length mismatch");
  if (c_in && c_in->size() != len) throw Error(ErrorCode::kShape, "preconditioner size mismatch");
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::kParameter, "tolerance must be positive");
  if (cfg.max_iters < 1) throw Error(ErrorCode::kParameter, "max_iters must be at least 1");
  if (cfg.operator_sign != 1.0 && cfg.operator_sign != -1.0)
    throw Error(ErrorCode::kParameter, "operator_sign must be +1 or -1");

  const double sign = cfg.operator_sign;
  const bool flipped = sign < 0.0;
  auto apply_a = [&](std::span<const double> x, std::span<double> y) {
    a_in.apply(x, y);
    if (flipped)
      for (auto& v : y) v = -v;
  };
  auto apply_c = [&](std::span<const double> x, std::span<double> y) {
    if (c_in) {
      c_in->apply(x, y);
    } else {
      std::copy(x.begin(), x.end(), y.begin());
    }
  };

  SolveReport report;
  report.b_norm = norm2(b_in);
  const double threshold = cfg.tol * report.b_norm;

  Vector xi(len, 0.0);
  Vector rho(b_in.begin(), b_in.end());
  if (flipped)
    for (auto& v : rho) v = -v;
  if (project) project_q_inplace(rho);
  Vector delta(len);
  apply_c(rho, delta);
  Vector z(len);
  Vector a_delta(len);

  double rc = dot(rho, delta);
  double rho_norm = norm2(rho);
  double delta_norm = norm2(delta);

  auto record = [&](std::size_t k) {
    if (cfg.record_history)
      report.history.push_back({k, rho_norm, delta_norm, e_component(rho, rho_norm)});
    if (cfg.observer) cfg.observer(IterateView{k, xi, rho, delta});
  };
  record(0);

  CyclingMonitor monitor(cfg.tol, report.b_norm);
  monitor.observe(delta_norm);

  report.status = SolveStatus::kMaxIters;
  if (report.b_norm == 0.0 || rho_norm < threshold || delta_norm < threshold) {
    report.status = SolveStatus::kConverged;
  } else if (!(rc > 0.0)) {
    throw Error(saddle ? ErrorCode::kBreakdown : ErrorCode::kIndefinite,
                saddle ? "rho^T C rho <= 0 at start; residual lies in the kernel of C"
                       : "rho^T C rho <= 0 at start; preconditioner is not positive definite");
  }

  for (std::size_t k = 0; report.status != SolveStatus::kConverged && k < cfg.max_iters; ++k) {
    apply_a(delta, a_delta);
    const double curvature = dot(delta, a_delta);
    if (saddle) {
      if (curvature == 0.0 || !std::isfinite(curvature))
        throw Error(ErrorCode::kBreakdown, "delta^T A delta = 0 at iteration " + std::to_string(k));
    } else if (!(curvature > 0.0)) {
      throw Error(ErrorCode::kIndefinite,
                  "delta^T A delta <= 0 at iteration " + std::to_string(k) +
                      "; operator is not positive definite");
    }
    const double step = rc / curvature;
    for (std::size_t i = 0; i < len; ++i) {
      xi[i] += step * delta[i];
      rho[i] -= step * a_delta[i];
    }
    if (project) project_q_inplace(rho);

    apply_c(rho, z);
    const double rc_next = dot(rho, z);
    rho_norm = norm2(rho);
    const bool rho_small = rho_norm < threshold;
    if (!rho_small && !(rc_next > 0.0)) {
      throw Error(saddle ? ErrorCode::kBreakdown : ErrorCode::kIndefinite,
                  "rho^T C rho <= 0 at iteration " + std::to_string(k + 1) +
                      (saddle ? "; residual lies in the kernel of C" : "; preconditioner is not positive definite"));
    }
    const double beta = rc_next / rc;
    for (std::size_t i = 0; i < len; ++i) delta[i] = z[i] + beta * delta[i];
    rc = rc_next;
    delta_norm = norm2(delta);

    report.iterations = k + 1;
    record(k + 1);
    monitor.observe(delta_norm);

    if (rho_small || delta_norm < threshold) {
      report.status = SolveStatus::kConverged;
    } else if (monitor.triggered() && cfg.stop_on_cycling) {
      break;
    }
  }
  if (report.status != SolveStatus::kConverged && monitor.triggered())
    report.status = SolveStatus::kCyclingDetected;

  report.solution = std::move(xi);
  Vector residual(len);
  a_in.apply(report.solution, residual);
  for (std::size_t i = 0; i < len; ++i) residual[i] = b_in[i] - residual[i];
  if (saddle) {
    const double y = recover_multiplier(a_in, report.solution, b_in);
    report.multiplier = y;
    for (auto& v : residual) v -= y;
  }
  report.true_residual = report.b_norm > 0.0 ? norm2(residual) / report.b_norm : norm2(residual);
  return report;
}

}  // namespace

SolveReport cg(const LinearOperator& a, std::span<const double> b, SolveConfig cfg) {
  cfg.variant = Variant::kPlain;
  return run_recurrences(a, nullptr, b, cfg, false, false);
}

SolveReport pcg(const LinearOperator& a, const LinearOperator& c, std::span<const double> b,
                SolveConfig cfg) {
  cfg.variant = Variant::kPreconditioned;
  return run_recurrences(a, &c, b, cfg, false, false);
}

SolveReport projected_pcg_stable(const LinearOperator& a, const LinearOperator& c,
                                 std::span<const double> b, SolveConfig cfg) {
  cfg.variant = Variant::kProjectedStable;
  return run_recurrences(a, &c, b, cfg, true, true);
}

SolveReport projected_pcg_unstable(const LinearOperator& a, const LinearOperator& c,
                                   std::span<const double> b, SolveConfig cfg) {
  cfg.variant = Variant::kProjectedUnstable;
  return run_recurrences(a, &c, b, cfg, false, true);
}

SolveReport solve(const LinearOperator& a, const LinearOperator& c, std::span<const double> b,
                  const SolveConfig& cfg) {
  switch (cfg.variant) {
    case Variant::kPlain: return cg(a, b, cfg);
    case Variant::kPreconditioned: return pcg(a, c, b, cfg);
    case Variant::kProjectedUnstable: return projected_pcg_unstable(a, c, b, cfg);
    case Variant::kProjectedStable: return projected_pcg_stable(a, c, b, cfg);
  }
  throw Error(ErrorCode::kParameter, "unknown variant");
}

}  // namespace toepcg
