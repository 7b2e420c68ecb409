#include "crysynth/optimizer.hpp"

#include "crysynth/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace crysynth {

void OptimizerConfig::validate() const {
  if (!(0.0 < wolfe_c1 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0))
    throw ArgumentError("Wolfe constants must satisfy 0 < c1 < c2 < 1");
  if (max_iters < 1) throw ArgumentError("max_iters must be at least 1");
  if (perturbation_scale < 0.0) throw ArgumentError("perturbation_scale must be non-negative");
  if (max_line_search_steps < 1) throw ArgumentError("max_line_search_steps must be at least 1");
  if (restart_count < 0) throw ArgumentError("restart_count must be non-negative");
}

std::string_view status_name(OptimizeStatus s) {
  switch (s) {
    case OptimizeStatus::Converged: return "converged";
    case OptimizeStatus::TargetReached: return "target-reached";
    case OptimizeStatus::IterLimit: return "iteration-limit";
    case OptimizeStatus::LineSearchFail: return "line-search-failure";
  }
  return "?";
}

namespace {

using Vec = Eigen::VectorXd;

struct Point {
  Vec x;
  double f = 0.0;
  Vec g;
};

class Evaluator {
 public:
  explicit Evaluator(const Objective& fn) : fn_(fn) {}

  Point at(Vec x) {
    Point p;
    p.g.resize(x.size());
    p.f = fn_(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
              std::span<double>(p.g.data(), static_cast<std::size_t>(p.g.size())));
    if (!std::isfinite(p.f) || !p.g.allFinite())
      throw NumericalError("non-finite cost or gradient", ParamVector(x.data(), x.data() + x.size()));
    p.x = std::move(x);
    return p;
  }

 private:
  const Objective& fn_;
};

struct LineSearchResult {
  bool ok = false;
  Point point;
};

double cubic_min(double a, double fa, double da, double b, double fb, double db) {
  // minimiser of the cubic interpolating (a, fa, da), (b, fb, db)
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  return b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
}

// Strong-Wolfe line search along p (bracketing phase plus zoom).
LineSearchResult wolfe_search(Evaluator& eval, const Point& start, const Vec& p, double alpha0,
                              const OptimizerConfig& cfg) {
  const double f0 = start.f;
  const double d0 = start.g.dot(p);
  int budget = cfg.max_line_search_steps;
  auto probe = [&](double a) { --budget; return eval.at(start.x + a * p); };
  auto armijo_ok = [&](double a, double fa) { return fa <= f0 + cfg.wolfe_c1 * a * d0; };
  auto curvature_ok = [&](double da) { return std::abs(da) <= -cfg.wolfe_c2 * d0; };

  LineSearchResult best;
  best.point = start;
  auto remember = [&](const Point& pt) {
    if (pt.f < best.point.f) best.point = pt;
  };

  auto zoom = [&](double lo, double f_lo, double d_lo, double hi, double f_hi, double d_hi) {
    while (budget > 0) {
      double a = cubic_min(lo, f_lo, d_lo, hi, f_hi, d_hi);
      const double left = std::min(lo, hi), right = std::max(lo, hi), width = right - left;
      if (!std::isfinite(a) || a < left + 0.1 * width || a > right - 0.1 * width) a = 0.5 * (lo + hi);
      if (width <= 1e-16 * std::max(1.0, right)) break;
      Point pt = probe(a);
      remember(pt);
      const double da = pt.g.dot(p);
      if (!armijo_ok(a, pt.f) || pt.f >= f_lo) {
        hi = a;
        f_hi = pt.f;
        d_hi = da;
      } else {
        if (curvature_ok(da)) return LineSearchResult{true, std::move(pt)};
        if (da * (hi - lo) >= 0.0) {
          hi = lo;
          f_hi = f_lo;
          d_hi = d_lo;
        }
        lo = a;
        f_lo = pt.f;
        d_lo = da;
      }
    }
    return LineSearchResult{};
  };

  double a_prev = 0.0, f_prev = f0, d_prev = d0;
  double a = alpha0;
  for (int i = 0; budget > 0; ++i) {
    Point pt = probe(a);
    remember(pt);
    const double da = pt.g.dot(p);
    if (!armijo_ok(a, pt.f) || (i > 0 && pt.f >= f_prev)) {
      auto r = zoom(a_prev, f_prev, d_prev, a, pt.f, da);
      if (r.ok) return r;
      break;
    }
    if (curvature_ok(da)) return LineSearchResult{true, std::move(pt)};
    if (da >= 0.0) {
      auto r = zoom(a, pt.f, da, a_prev, f_prev, d_prev);
      if (r.ok) return r;
      break;
    }
    a_prev = a;
    f_prev = pt.f;
    d_prev = da;
    a *= 2.0;
  }
  // No strong-Wolfe point; accept any strict decrease so progress is kept.
  best.ok = false;
  return best;
}

struct RunResult {
  Point best;
  int iterations = 0;
  OptimizeStatus status = OptimizeStatus::Converged;
};

RunResult bfgs_run(Evaluator& eval, Point x, const OptimizerConfig& cfg) {
  const Eigen::Index n = x.x.size();
  RunResult r;
  if (x.f <= cfg.target_cost) {
    r.best = std::move(x);
    r.status = OptimizeStatus::TargetReached;
    return r;
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;
  int stalled = 0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    if (x.g.lpNorm<Eigen::Infinity>() < cfg.grad_tol) {
      r.status = OptimizeStatus::Converged;
      r.best = std::move(x);
      return r;
    }
    Vec p = -h * x.g;
    double slope = x.g.dot(p);
    if (!(slope < 0.0)) {
      h.setIdentity();
      scaled = false;
      p = -x.g;
      slope = -x.g.squaredNorm();
    }
    double alpha0 = 1.0;
    if (!scaled) alpha0 = std::min(1.0, 1.0 / std::max(p.lpNorm<Eigen::Infinity>(), 1e-300));

    LineSearchResult ls = wolfe_search(eval, x, p, alpha0, cfg);
    if (!ls.ok && scaled) {
      // retry once along steepest descent with a fresh curvature model
      h.setIdentity();
      scaled = false;
      p = -x.g;
      alpha0 = std::min(1.0, 1.0 / std::max(p.lpNorm<Eigen::Infinity>(), 1e-300));
      LineSearchResult retry = wolfe_search(eval, x, p, alpha0, cfg);
      if (retry.ok || retry.point.f < ls.point.f) ls = std::move(retry);
    }
    r.iterations = it + 1;
    if (!ls.ok) {
      // keep whatever decrease the search found
      r.status = OptimizeStatus::LineSearchFail;
      r.best = ls.point.f < x.f ? std::move(ls.point) : std::move(x);
      if (r.best.f <= cfg.target_cost) r.status = OptimizeStatus::TargetReached;
      return r;
    }

    Point next = std::move(ls.point);
    const Vec s = next.x - x.x;
    const Vec y = next.g - x.g;
    const double decrease = x.f - next.f;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      if (!scaled) {
        h *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Vec hy = h * y;
      const double yhy = y.dot(hy);
      h.noalias() += ((1.0 + rho * yhy) * rho) * (s * s.transpose());
      h.noalias() -= rho * (hy * s.transpose() + s * hy.transpose());
    }
    x = std::move(next);
    if (x.f <= cfg.target_cost) {
      r.status = OptimizeStatus::TargetReached;
      r.best = std::move(x);
      return r;
    }
    if (cfg.f_tol > 0.0) {
      stalled = decrease <= cfg.f_tol * std::max(1.0, std::abs(x.f)) ? stalled + 1 : 0;
      if (stalled >= cfg.stall_iters) {
        r.status = OptimizeStatus::Converged;
        r.best = std::move(x);
        return r;
      }
    }
  }
  r.status = OptimizeStatus::IterLimit;
  r.best = std::move(x);
  return r;
}

}  // namespace

OptimizeResult minimize(const Objective& objective, ParamVector x0, const OptimizerConfig& cfg) {
  cfg.validate();
  for (double v : x0)
    if (!std::isfinite(v)) throw NumericalError("non-finite starting point", x0);
  Evaluator eval(objective);
  const Eigen::Index n = static_cast<Eigen::Index>(x0.size());
  Point start = eval.at(Eigen::Map<const Vec>(x0.data(), n));

  OptimizeResult out;
  if (n == 0) {
    out.x_best = std::move(x0);
    out.f_best = start.f;
    out.status = start.f <= cfg.target_cost ? OptimizeStatus::TargetReached : OptimizeStatus::Converged;
    return out;
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> jitter(-cfg.perturbation_scale, cfg.perturbation_scale);
  Point best = start;
  OptimizeStatus last = OptimizeStatus::Converged;
  for (int attempt = 0; attempt <= cfg.restart_count; ++attempt) {
    Point from = start;
    if (attempt > 0) {
      Vec x = best.x;
      for (Eigen::Index i = 0; i < n; ++i) x[i] += jitter(rng);
      from = eval.at(std::move(x));
      ++out.restarts;
    }
    RunResult run = bfgs_run(eval, std::move(from), cfg);
    out.iterations += run.iterations;
    last = run.status;
    if (run.best.f < best.f) best = std::move(run.best);
    if (best.f <= cfg.target_cost) break;
    const bool has_target = std::isfinite(cfg.target_cost);
    if (last == OptimizeStatus::Converged && !has_target) break;
  }
  out.x_best.assign(best.x.data(), best.x.data() + n);
  out.f_best = best.f;
  out.status = best.f <= cfg.target_cost ? OptimizeStatus::TargetReached : last;
  return out;
}

OptimizeResult minimize(const std::function<double(std::span<const double>)>& cost,
                        const std::function<void(std::span<const double>, std::span<double>)>& grad,
                        ParamVector x0, const OptimizerConfig& cfg) {
  const Objective combined = [&](std::span<const double> x, std::span<double> g) {
    grad(x, g);
    return cost(x);
  };
  return minimize(combined, std::move(x0), cfg);
}

}  // namespace crysynth
