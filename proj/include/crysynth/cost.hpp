#pragma once

#include "crysynth/circuit.hpp"
#include "crysynth/linalg.hpp"

#include <span>
#include <utility>
#include <vector>

namespace crysynth {

/// Distance and fidelity figures between a target U and a circuit V(p),
/// all derived from t = Tr(U^dagger V):
///   c_hst         = 1 - |t|^2 / d^2
///   f_raw         = d - Re t             (= 1/2 ||V - U||_F^2)
///   f_aligned     = d - |t|              (f_raw after the best global phase)
///   fidelity_avg  = 1 - d/(d+1) c_hst
///   fidelity_frob = 1 - d/(d+1) + (d - f_aligned)^2 / (d (d+1))
struct CostReport {
  double f_raw = 0.0;
  double f_aligned = 0.0;
  double c_hst = 0.0;
  double fidelity_avg = 0.0;
  double fidelity_frob = 0.0;
  cplx trace_inner{};
};

CostReport make_report(cplx trace_inner, int dim);

CostReport evaluate(const Matrix& target, const Circuit& c, std::span<const double> params);

/// d f_aligned / d params.
std::vector<double> gradient(const Matrix& target, const Circuit& c, std::span<const double> params);

/// Phase-aligned cost of one (target, circuit) pair with reusable workspace.
/// Not thread-safe; use one instance per thread.
class CostFunction {
 public:
  CostFunction(const Matrix& target, Circuit circuit);

  const Circuit& circuit() const { return circuit_; }
  int dim() const { return static_cast<int>(adj_target_.rows()); }

  /// Tr(U^dagger V(p)), global phase included.
  cplx trace(std::span<const double> params);
  double value(std::span<const double> params);
  /// Returns f_aligned and writes its gradient into `grad`.
  double value_and_gradient(std::span<const double> params, std::span<double> grad);

 private:
  void load_gates(std::span<const double> params);

  Matrix adj_target_;
  Circuit circuit_;
  Matrix work_;
  std::vector<LocalMatrix> locals_;
  std::vector<std::pair<int, cplx>> scratch_;
};

}  // namespace crysynth
