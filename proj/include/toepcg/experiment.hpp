#pragma once

// Experiment runner behind the `toepcg` command-line tool.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toepcg/kernels.hpp"
#include "toepcg/krylov.hpp"
#include "toepcg/precond.hpp"

namespace toepcg {

enum class Command { kSolve, kStencil, kSpectrum, kSymbol, kRepro };
/// uniform: seeded U[-1,1]; squares: b_i = (i+1)^2 over the whole vector;
/// file: whitespace-separated values.
enum class RhsMode { kUniform, kSquares, kFile };
enum class OutputFormat { kCsv, kJson };
/// What the `symbol` command samples.
enum class SymbolTarget { kKernel, kReciprocal, kStencil, kProduct };

struct ExperimentSpec {
  Command command = Command::kSolve;
  KernelKind kernel = KernelKind::kGaussian;
  double lambda = 1.0;
  double c = 1.0;
  std::size_t n = 64;     // section half-width
  std::size_t m = 9;      // stencil half-band
  std::size_t big_n = 2048;  // system grid [-N, N]
  std::size_t dim = 1;
  std::uint64_t seed = 1;
  double tol = 1e-13;
  std::size_t max_iters = 1000;
  RhsMode rhs = RhsMode::kUniform;
  std::string rhs_file;
  std::optional<Variant> variant;  // default: preconditioned / projected_stable by kernel
  OutputFormat format = OutputFormat::kCsv;
  std::string out;        // empty: CSV to stdout, summary to stderr
  std::string cache_dir;  // stencil cache; empty disables caching
  bool even_length = false;  // vectors of length 2N instead of 2N + 1
  std::size_t gridsize = 2048;
  SymbolTarget symbol_target = SymbolTarget::kKernel;
  std::string repro_target = "all";

  RadialKernel make_kernel() const;
  /// Vector length of the solve system: (2N+1)^d, or 2N with even_length.
  std::size_t system_length() const;
  Variant effective_variant() const;
  /// Throws Error(kParameter) on inconsistent settings.
  void validate() const;
};

/// Exit codes of `run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Executes one experiment, writing artifacts as described by the spec.
int run(const ExperimentSpec& spec);

/// Builds the stencil or loads it from `cache_dir`; `provenance` receives
/// "computed", "cache-hit:<path>" or "computed+cached:<path>".
PrecondStencil obtain_stencil(const RadialKernel& kernel, std::size_t n, std::size_t m,
                              const std::string& cache_dir, std::string* provenance = nullptr);

/// Right-hand side for the spec's rhs mode and system length.
Vector make_rhs(const ExperimentSpec& spec, std::size_t length);

struct ManifestEntry {
  std::string id;    // "table1".."table6", "fig1", "fig2", "fig5", "fig6"
  std::string kind;  // "table" or "figure"
  std::string published;
  std::string measured;
  bool pass = false;
  std::vector<std::string> artifacts;
  std::string note;
};

/// Runs the named reproductions ("all" for every table and figure) into
/// `out_dir` and writes manifest.json there. Returns the manifest entries.
std::vector<ManifestEntry> repro(const std::string& target, const std::string& out_dir,
                                 std::uint64_t seed = 1, const std::string& cache_dir = "");

/// Entry point for the command-line tool: parses arguments and calls run.
int cli_main(int argc, char** argv);

}  // namespace toepcg
