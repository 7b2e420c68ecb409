#include "crysynth/cost.hpp"

#include "crysynth/errors.hpp"

#include <cmath>
#include <string>

namespace crysynth {

CostReport make_report(cplx t, int d) {
  CostReport r;
  const double dd = d;
  const double mag = std::abs(t);
  r.trace_inner = t;
  r.f_raw = dd - t.real();
  r.f_aligned = dd - mag;
  r.c_hst = 1.0 - mag * mag / (dd * dd);
  r.fidelity_avg = 1.0 - dd / (dd + 1.0) * r.c_hst;
  r.fidelity_frob = 1.0 - dd / (dd + 1.0) + (dd - r.f_aligned) * (dd - r.f_aligned) / (dd * (dd + 1.0));
  return r;
}

CostReport evaluate(const Matrix& target, const Circuit& c, std::span<const double> params) {
  CostFunction f(target, c);
  return make_report(f.trace(params), f.dim());
}

std::vector<double> gradient(const Matrix& target, const Circuit& c, std::span<const double> params) {
  CostFunction f(target, c);
  std::vector<double> g(params.size());
  f.value_and_gradient(params, g);
  return g;
}

CostFunction::CostFunction(const Matrix& target, Circuit circuit) : circuit_(std::move(circuit)) {
  if (target.rows() != target.cols() || target.rows() != (Eigen::Index{1} << circuit_.n_qubits()))
    throw ArgumentError("target dimension " + std::to_string(target.rows()) +
                        " does not match a " + std::to_string(circuit_.n_qubits()) + "-qubit circuit");
  adj_target_ = target.adjoint();
  locals_.resize(circuit_.size());
}

void CostFunction::load_gates(std::span<const double> params) {
  if (static_cast<int>(params.size()) != circuit_.n_params())
    throw ArgumentError("parameter vector has " + std::to_string(params.size()) +
                        " entries, circuit expects " + std::to_string(circuit_.n_params()));
  const auto& gates = circuit_.gates();
  for (std::size_t i = 0; i < gates.size(); ++i) locals_[i] = gate_local(gates[i], params);
}

cplx CostFunction::trace(std::span<const double> params) {
  load_gates(params);
  work_ = adj_target_;
  const auto& gates = circuit_.gates();
  for (std::size_t i = gates.size(); i-- > 0;)
    apply_gate_inplace(work_, locals_[i], gates[i].qubit_list(), Side::Right);
  return work_.trace() * std::exp(cplx(0.0, circuit_.global_phase()));
}

double CostFunction::value(std::span<const double> params) {
  return static_cast<double>(dim()) - std::abs(trace(params));
}

namespace {

// R(a, b) = sum over the untouched bits of E(base + off[a], base + off[b]).
LocalMatrix reduce_onto(const Matrix& e, const Gate& g) {
  const int d = static_cast<int>(e.rows());
  std::array<int, 4> off{};
  int mask = 0;
  LocalMatrix r;
  if (g.arity() == 1) {
    r.dim = 2;
    off = {0, 1 << g.qubits[0], 0, 0};
    mask = 1 << g.qubits[0];
  } else {
    r.dim = 4;
    const int hi = 1 << g.qubits[0], lo = 1 << g.qubits[1];
    off = {0, lo, hi, hi | lo};
    mask = hi | lo;
  }
  for (int base = 0; base < d; ++base) {
    if (base & mask) continue;
    for (int a = 0; a < r.dim; ++a)
      for (int b = 0; b < r.dim; ++b) r(a, b) += e(base + off[static_cast<std::size_t>(a)], base + off[static_cast<std::size_t>(b)]);
  }
  return r;
}

// Tr(R * X) over the gate-local space.
cplx contract(const LocalMatrix& r, const LocalMatrix& x) {
  cplx s = 0.0;
  for (int a = 0; a < r.dim; ++a)
    for (int b = 0; b < r.dim; ++b) s += r(a, b) * x(b, a);
  return s;
}

}  // namespace

double CostFunction::value_and_gradient(std::span<const double> params, std::span<double> grad) {
  load_gates(params);
  if (grad.size() != params.size()) throw ArgumentError("gradient buffer has the wrong length");
  const auto& gates = circuit_.gates();
  const std::size_t m = gates.size();
  const double d = dim();
  if (m == 0) {
    const cplx t = adj_target_.trace() * std::exp(cplx(0.0, circuit_.global_phase()));
    return d - std::abs(t);
  }

  // Environment of gate g: E_g = G_{g-1}..G_1 U^dagger G_m..G_{g+1}, so that
  // Tr(U^dagger V) = Tr(E_g G_g) and dt/dp = Tr(E_g dG_g/dp).
  work_ = adj_target_;
  for (std::size_t i = m; i-- > 1;) apply_gate_inplace(work_, locals_[i], gates[i].qubit_list(), Side::Right);

  const cplx phase = std::exp(cplx(0.0, circuit_.global_phase()));
  cplx t = 0.0;
  std::vector<std::pair<int, cplx>>& dt = scratch_;
  dt.clear();
  for (std::size_t i = 0; i < m; ++i) {
    const Gate& g = gates[i];
    const LocalMatrix r = reduce_onto(work_, g);
    if (i == 0) t = contract(r, locals_[0]) * phase;
    if (g.param_count() > 0) {
      const auto v = gate_params(g, params);
      const std::span<const double> vs(v.data(), static_cast<std::size_t>(g.param_count()));
      for (int k = 0; k < g.param_count(); ++k)
        dt.emplace_back(g.slots[static_cast<std::size_t>(k)],
                        contract(r, gate_local_derivative(g.kind, vs, k)) * phase);
    }
    if (i + 1 < m) {
      apply_gate_inplace(work_, locals_[i], g.qubit_list(), Side::Left);
      apply_gate_inplace(work_, locals_[i + 1].adjoint(), gates[i + 1].qubit_list(), Side::Right);
    }
  }

  const double mag = std::abs(t);
  const cplx align = mag > 0.0 ? std::conj(t) / mag : cplx(1.0);
  for (const auto& [slot, v] : dt) grad[static_cast<std::size_t>(slot)] = -(align * v).real();
  return d - mag;
}

}  // namespace crysynth
