#pragma once

#include "crysynth/circuit.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string_view>

namespace crysynth {

struct OptimizerConfig {
  int max_iters = 5000;
  /// stop when ||g||_inf < grad_tol
  double grad_tol = 1e-10;
  /// early stop once f <= target_cost; a finite target also makes a
  /// converged-but-short run eligible for restarts
  double target_cost = -std::numeric_limits<double>::infinity();
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search_steps = 30;
  int restart_count = 3;
  double perturbation_scale = 0.3;
  /// Stop as converged after `stall_iters` consecutive iterations whose
  /// decrease is below f_tol * max(1, |f|). 0 disables the test.
  double f_tol = 0.0;
  int stall_iters = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class OptimizeStatus { Converged, TargetReached, IterLimit, LineSearchFail };

std::string_view status_name(OptimizeStatus s);

struct OptimizeResult {
  ParamVector x_best;
  double f_best = 0.0;
  /// BFGS iterations summed over all restarts
  int iterations = 0;
  int restarts = 0;
  OptimizeStatus status = OptimizeStatus::Converged;
};

/// Writes the gradient at x into `grad` and returns f(x).
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// BFGS with a strong-Wolfe line search, restarted from perturbations of the
/// best point when a run stalls short of the target. f_best <= f(x0) always.
/// Throws NumericalError on a non-finite cost or gradient.
OptimizeResult minimize(const Objective& objective, ParamVector x0, const OptimizerConfig& cfg);

OptimizeResult minimize(const std::function<double(std::span<const double>)>& cost,
                        const std::function<void(std::span<const double>, std::span<double>)>& grad,
                        ParamVector x0, const OptimizerConfig& cfg);

}  // namespace crysynth
