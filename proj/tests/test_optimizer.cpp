#include "crysynth/errors.hpp"
#include "crysynth/optimizer.hpp"

#include "gtest/gtest.h"

#include <cmath>
#include <limits>

using namespace crysynth;

namespace {

double quadratic(std::span<const double> x, std::span<double> g) {
  double f = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = static_cast<double>(i + 1);
    f += 0.5 * w * (x[i] - 1.0) * (x[i] - 1.0);
    g[i] = w * (x[i] - 1.0);
  }
  return f;
}

double rosenbrock(std::span<const double> x, std::span<double> g) {
  const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
  g[0] = -2.0 * a - 400.0 * x[0] * b;
  g[1] = 200.0 * b;
  return a * a + 100.0 * b * b;
}

}  // namespace

TEST(optimizer, quadratic_converges) {
  const OptimizeResult r = minimize(quadratic, ParamVector(5, -3.0), OptimizerConfig{});
  EXPECT_LT(r.f_best, 1e-16);
  for (double v : r.x_best) EXPECT_NEAR(v, 1.0, 1e-8);
  EXPECT_GT(r.iterations, 0);
}

TEST(optimizer, zero_length_input) {
  const OptimizeResult r = minimize([](std::span<const double>, std::span<double>) { return 0.25; },
                                    ParamVector{}, OptimizerConfig{});
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.f_best, 0.25);
  EXPECT_TRUE(r.x_best.empty());
}

TEST(optimizer, rosenbrock) {
  OptimizerConfig cfg;
  cfg.restart_count = 0;
  const OptimizeResult r = minimize(rosenbrock, ParamVector{-1.2, 1.0}, cfg);
  EXPECT_LT(r.f_best, 1e-12);
  EXPECT_NEAR(r.x_best[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x_best[1], 1.0, 1e-5);
}

TEST(optimizer, target_reached_stops_early) {
  OptimizerConfig cfg;
  cfg.target_cost = 1e-2;
  const OptimizeResult r = minimize(quadratic, ParamVector(4, 5.0), cfg);
  EXPECT_EQ(r.status, OptimizeStatus::TargetReached);
  EXPECT_LE(r.f_best, 1e-2);
}

TEST(optimizer, iteration_limit) {
  OptimizerConfig cfg;
  cfg.max_iters = 3;
  cfg.restart_count = 0;
  const OptimizeResult r = minimize(rosenbrock, ParamVector{-1.2, 1.0}, cfg);
  EXPECT_EQ(r.status, OptimizeStatus::IterLimit);
  EXPECT_LE(r.iterations, 3);
}

TEST(optimizer, never_worse_than_start_and_deterministic) {
  // periodic landscape with many local minima
  auto bumpy = [](std::span<const double> x, std::span<double> g) {
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      f += 1.0 - std::cos(3.0 * x[i]) + 0.05 * x[i] * x[i];
      g[i] = 3.0 * std::sin(3.0 * x[i]) + 0.1 * x[i];
    }
    return f;
  };
  OptimizerConfig cfg;
  cfg.seed = 17;
  cfg.target_cost = 0.0;
  const ParamVector x0{2.1, -4.0, 0.7};
  std::vector<double> g(3);
  const double f0 = bumpy(x0, g);
  const OptimizeResult a = minimize(bumpy, x0, cfg);
  const OptimizeResult b = minimize(bumpy, x0, cfg);
  EXPECT_LE(a.f_best, f0);
  EXPECT_EQ(a.x_best, b.x_best);
  EXPECT_EQ(a.f_best, b.f_best);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(optimizer, separate_cost_and_gradient) {
  auto cost = [](std::span<const double> x) { return (x[0] - 2.0) * (x[0] - 2.0); };
  auto grad = [](std::span<const double> x, std::span<double> g) { g[0] = 2.0 * (x[0] - 2.0); };
  const OptimizeResult r = minimize(cost, grad, ParamVector{10.0}, OptimizerConfig{});
  EXPECT_NEAR(r.x_best[0], 2.0, 1e-8);
}

TEST(optimizer, rejects_nonfinite) {
  auto bad = [](std::span<const double>, std::span<double> g) {
    g[0] = 0.0;
    return std::numeric_limits<double>::quiet_NaN();
  };
  EXPECT_THROW(minimize(bad, ParamVector{1.0}, OptimizerConfig{}), NumericalError);
}

TEST(optimizer, config_validation) {
  OptimizerConfig cfg;
  cfg.wolfe_c1 = 0.95;
  EXPECT_THROW(cfg.validate(), ArgumentError);
  cfg = OptimizerConfig{};
  cfg.max_iters = -1;
  EXPECT_THROW(cfg.validate(), ArgumentError);
  EXPECT_THROW(minimize(quadratic, ParamVector(2), cfg), ArgumentError);
}
