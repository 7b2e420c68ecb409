#include "crysynth/lift.hpp"

#include "crysynth/cost.hpp"
#include "crysynth/errors.hpp"

#include <chrono>
#include <numbers>

namespace crysynth {

namespace {

using std::numbers::pi;

void emit(Circuit& out, ParamVector& q, GateKind kind, std::initializer_list<int> qubits,
          std::initializer_list<double> values = {}) {
  out.add(kind, qubits);
  q.insert(q.end(), values.begin(), values.end());
}

// CNOT(c, t) = P(pi/2)@c . Sdg@t . CRY(pi) . S@t
void lift_cnot(Circuit& out, ParamVector& q, int c, int t) {
  emit(out, q, GateKind::S, {t});
  emit(out, q, GateKind::CRY, {c, t}, {pi});
  emit(out, q, GateKind::Sdg, {t});
  emit(out, q, GateKind::P, {c}, {pi / 2});
}

}  // namespace

CircuitParams lift_circuit(const Circuit& c, std::span<const double> params) {
  if (static_cast<int>(params.size()) != c.n_params()) throw ArgumentError("parameter length mismatch");
  const int n = c.n_qubits();
  Circuit raw(n);
  ParamVector q;
  for (const Gate& g : c.gates()) {
    const auto v = gate_params(g, params);
    switch (g.kind) {
      case GateKind::CNOT:
        lift_cnot(raw, q, g.qubits[0], g.qubits[1]);
        break;
      case GateKind::CZ:
        emit(raw, q, GateKind::H, {g.qubits[1]});
        lift_cnot(raw, q, g.qubits[0], g.qubits[1]);
        emit(raw, q, GateKind::H, {g.qubits[1]});
        break;
      default:
        raw.add(g.kind, g.qubit_list());
        q.insert(q.end(), v.begin(), v.begin() + g.param_count());
    }
  }
  raw.set_global_phase(c.global_phase());
  const CircuitParams merged = merge_single_qubit_runs(raw, q);

  // Tag blocks: each CRY claims the U3 right before it on each wire.
  const auto& gates = merged.circuit.gates();
  std::vector<std::optional<int>> tag(gates.size());
  std::vector<bool> needs_identity_before(gates.size() * 2, false);
  std::vector<int> last(static_cast<std::size_t>(n), -1);
  int next_block = 0;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const Gate& g = gates[i];
    if (g.kind == GateKind::CRY) {
      const int id = next_block++;
      tag[i] = id;
      for (int k = 0; k < 2; ++k) {
        const int prev = last[static_cast<std::size_t>(g.qubits[static_cast<std::size_t>(k)])];
        if (prev >= 0 && gates[static_cast<std::size_t>(prev)].kind == GateKind::U3)
          tag[static_cast<std::size_t>(prev)] = id;
        else
          needs_identity_before[2 * i + static_cast<std::size_t>(k)] = true;
      }
    }
    for (int w : g.qubit_list()) last[static_cast<std::size_t>(w)] = static_cast<int>(i);
  }

  Circuit out(n);
  ParamVector p;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const Gate& g = gates[i];
    for (int k = 0; k < 2; ++k)
      if (needs_identity_before[2 * i + static_cast<std::size_t>(k)]) {
        out.add(GateKind::U3, {g.qubits[static_cast<std::size_t>(k)]}, tag[i]);
        p.insert(p.end(), 3, 0.0);
      }
    out.add(g.kind, g.qubit_list(), tag[i]);
    const auto v = gate_params(g, merged.params);
    p.insert(p.end(), v.begin(), v.begin() + g.param_count());
  }
  for (int w = 0; w < n; ++w) {
    const int l = last[static_cast<std::size_t>(w)];
    if (l >= 0 && gates[static_cast<std::size_t>(l)].kind == GateKind::CRY) emit(out, p, GateKind::U3, {w}, {0.0, 0.0, 0.0});
  }
  out.set_global_phase(merged.circuit.global_phase());
  out.validate();
  return {std::move(out), std::move(p)};
}

int two_qubit_cost(const Circuit& c, std::span<const double> params, double tol_class) {
  int total = 0;
  for (const Gate& g : c.gates()) {
    if (g.kind == GateKind::CNOT || g.kind == GateKind::CZ) ++total;
    if (g.kind == GateKind::CRY) total += cry_cnot_cost(gate_params(g, params)[0], tol_class);
  }
  return total;
}

RecompressReport recompress(const Circuit& c, std::span<const double> params, const CouplingGraph& g,
                            const SynthesisConfig& cfg) {
  cfg.validate();
  if (g.n_qubits() != c.n_qubits()) throw ArgumentError("coupling graph qubit count does not match");
  for (const Gate& gate : c.gates())
    if (gate.arity() == 2 && !g.allows(gate.qubits[0], gate.qubits[1]))
      throw ArgumentError("gate on " + std::to_string(gate.qubits[0]) + "-" + std::to_string(gate.qubits[1]) +
                          " violates the coupling graph");
  const auto start = std::chrono::steady_clock::now();
  const Matrix target = build_unitary(c, params);
  const int input_cost = two_qubit_cost(c, params, cfg.tol_class);

  auto as_input = [&] {
    RecompressReport r;
    r.circuit = c;
    r.params.assign(params.begin(), params.end());
    r.cnot_count = input_cost;
    r.single_qubit_count = static_cast<int>(c.size() - c.two_qubit_count());
    r.seed = cfg.seed;
    r.unchanged = true;
    return r;
  };

  RecompressReport out;
  const CircuitParams lifted = lift_circuit(c, params);
  try {
    const CompressResult comp = compress(target, lifted.circuit, lifted.params, cfg);
    static_cast<SynthesisReport&>(out) = finalize(target, comp.circuit, comp.params, cfg);
    out.removed_blocks = comp.removed;
  } catch (const FinalizeError&) {
    out = as_input();
  }
  if (!out.unchanged && out.cnot_count >= input_cost) out = as_input();
  if (out.unchanged) {
    const CostReport rep = evaluate(target, c, params);
    out.f_aligned = rep.f_aligned;
    out.f_raw = rep.f_raw;
    out.fidelity_avg = rep.fidelity_avg;
    out.fidelity_frob = rep.fidelity_frob;
  }
  out.input_cnot_count = input_cost;
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

SynthesisReport recompress(const Matrix& target, const CouplingGraph& g, const SynthesisConfig& cfg) {
  return synthesize(target, g, cfg);
}

}  // namespace crysynth
