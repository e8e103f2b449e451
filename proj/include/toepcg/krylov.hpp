#pragma once

// Conjugate gradients in the (xi, rho, delta) form with a preconditioner C,
// and the two projected variants for the multiquadric saddle system
//   A x + e y = b,   e^T x = 0.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "toepcg/linear_operator.hpp"
#include "toepcg/numkit.hpp"

namespace toepcg {

enum class Variant { kPlain, kPreconditioned, kProjectedUnstable, kProjectedStable };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

struct IterateView {
  std::size_t iteration;
  std::span<const double> xi;
  std::span<const double> rho;
  std::span<const double> delta;
};

struct SolveConfig {
  double tol = 1e-13;          // relative to ||b||
  std::size_t max_iters = 1000;
  bool record_history = true;
  Variant variant = Variant::kPreconditioned;
  /// The recurrences run on (s A, s b); s = -1 makes the multiquadric
  /// restricted operator positive definite. Reported x and y are unaffected.
  double operator_sign = 1.0;
  bool stop_on_cycling = false;
  std::function<void(const IterateView&)> observer;
};

struct IterationRecord {
  std::size_t iteration;
  double residual_norm;   // ||rho_k||
  double direction_norm;  // ||delta_k||
  double e_component;     // |e^T rho_k| / ||rho_k||
};

enum class SolveStatus { kConverged, kMaxIters, kCyclingDetected };

std::string to_string(SolveStatus s);

struct SolveReport {
  std::size_t iterations = 0;
  /// Row 0 holds the initial residual and direction; row k the state after
  /// iteration k.
  std::vector<IterationRecord> history;
  SolveStatus status = SolveStatus::kMaxIters;
  Vector solution;
  std::optional<double> multiplier;
  double b_norm = 0.0;
  /// ||b - A x - e y|| / ||b|| recomputed from scratch (y = 0 if no multiplier).
  double true_residual = 0.0;

  bool converged() const noexcept { return status == SolveStatus::kConverged; }
};

SolveReport cg(const LinearOperator& a, std::span<const double> b, SolveConfig cfg = {});
SolveReport pcg(const LinearOperator& a, const LinearOperator& c, std::span<const double> b,
                SolveConfig cfg = {});

/// x - e (e^T x) / (e^T e).
Vector project_q(std::span<const double> x);
void project_q_inplace(std::span<double> x);

SolveReport projected_pcg_stable(const LinearOperator& a, const LinearOperator& c,
                                 std::span<const double> b, SolveConfig cfg = {});
/// No re-projection of rho; drifts out of the zero-sum subspace in
/// floating point. Kept for the instability demonstration.
SolveReport projected_pcg_unstable(const LinearOperator& a, const LinearOperator& c,
                                   std::span<const double> b, SolveConfig cfg = {});

/// y = e^T (b - A x) / length.
double recover_multiplier(const LinearOperator& a, std::span<const double> x,
                          std::span<const double> b);

/// Dispatches on cfg.variant (kPlain ignores c).
SolveReport solve(const LinearOperator& a, const LinearOperator& c, std::span<const double> b,
                  const SolveConfig& cfg);

}  // namespace toepcg
