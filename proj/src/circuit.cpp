#include "crysynth/circuit.hpp"

#include "crysynth/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace crysynth {

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw RangeError("qubit count must lie in [1, 6], got " + std::to_string(n_qubits));
}

Circuit Circuit::from_gates(int n_qubits, std::vector<Gate> gates, int n_params,
                            double global_phase) {
  Circuit c(n_qubits);
  c.gates_ = std::move(gates);
  c.n_params_ = n_params;
  c.global_phase_ = global_phase;
  int next = 0;
  for (const Gate& g : c.gates_)
    if (g.block) next = std::max(next, *g.block + 1);
  c.next_block_ = next;
  c.validate();
  return c;
}

std::size_t Circuit::add(GateKind kind, std::span<const int> qubits, std::optional<int> block) {
  Gate g;
  g.kind = kind;
  if (static_cast<int>(qubits.size()) != crysynth::arity(kind))
    throw ArgumentError("gate " + std::string(gate_name(kind)) + " expects " +
                        std::to_string(crysynth::arity(kind)) + " qubits");
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (qubits[i] < 0 || qubits[i] >= n_qubits_)
      throw ArgumentError("qubit index " + std::to_string(qubits[i]) + " out of range");
    g.qubits[i] = qubits[i];
  }
  if (qubits.size() == 2 && qubits[0] == qubits[1])
    throw ArgumentError("two-qubit gate on a single wire");
  for (int i = 0; i < crysynth::param_count(kind); ++i) g.slots[static_cast<std::size_t>(i)] = n_params_++;
  g.block = block;
  if (block) next_block_ = std::max(next_block_, *block + 1);
  gates_.push_back(g);
  return gates_.size() - 1;
}

std::vector<int> Circuit::block_ids() const {
  std::vector<int> ids;
  for (const Gate& g : gates_)
    if (g.block && g.kind == GateKind::CRY) ids.push_back(*g.block);
  return ids;
}

std::size_t Circuit::count(GateKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(gates_.begin(), gates_.end(), [kind](const Gate& g) { return g.kind == kind; }));
}

std::size_t Circuit::two_qubit_count() const {
  return static_cast<std::size_t>(
      std::count_if(gates_.begin(), gates_.end(), [](const Gate& g) { return g.arity() == 2; }));
}

void Circuit::validate() const {
  if (n_params_ < 0) throw ArgumentError("negative parameter count");
  std::vector<int> owner(static_cast<std::size_t>(n_params_), 0);
  struct BlockTally {
    int cry = 0;
    int u3 = 0;
    int other = 0;
  };
  std::map<int, BlockTally> blocks;
  for (const Gate& g : gates_) {
    for (int i = 0; i < g.arity(); ++i)
      if (g.qubits[static_cast<std::size_t>(i)] < 0 || g.qubits[static_cast<std::size_t>(i)] >= n_qubits_)
        throw ArgumentError("gate qubit out of range");
    if (g.arity() == 2 && g.qubits[0] == g.qubits[1]) throw ArgumentError("two-qubit gate on a single wire");
    for (int s : g.slot_list()) {
      if (s < 0 || s >= n_params_) throw ArgumentError("parameter slot out of range");
      if (owner[static_cast<std::size_t>(s)]++) throw ArgumentError("parameter slot shared by two gates");
    }
    if (g.block) {
      auto& t = blocks[*g.block];
      if (g.kind == GateKind::CRY)
        ++t.cry;
      else if (g.kind == GateKind::U3)
        ++t.u3;
      else
        ++t.other;
    }
  }
  for (int o : owner)
    if (o == 0) throw ArgumentError("orphan parameter slot");
  for (const auto& [id, t] : blocks)
    if (t.cry != 1 || t.u3 != 2 || t.other != 0)
      throw ArgumentError("block " + std::to_string(id) + " does not tag exactly one CRY and two U3");
}

std::array<double, 3> gate_params(const Gate& g, std::span<const double> params) {
  std::array<double, 3> v{};
  for (int i = 0; i < g.param_count(); ++i)
    v[static_cast<std::size_t>(i)] = params[static_cast<std::size_t>(g.slots[static_cast<std::size_t>(i)])];
  return v;
}

LocalMatrix gate_local(const Gate& g, std::span<const double> params) {
  const auto v = gate_params(g, params);
  return gate_local(g.kind, std::span<const double>(v.data(), static_cast<std::size_t>(g.param_count())));
}

Matrix build_unitary(const Circuit& c, std::span<const double> params) {
  if (static_cast<int>(params.size()) != c.n_params())
    throw ArgumentError("parameter vector has " + std::to_string(params.size()) +
                        " entries, circuit expects " + std::to_string(c.n_params()));
  const int d = 1 << c.n_qubits();
  Matrix v = Matrix::Identity(d, d);
  for (const Gate& g : c.gates()) apply_gate_inplace(v, gate_local(g, params), g.qubit_list(), Side::Left);
  if (c.global_phase() != 0.0) v *= std::exp(cplx(0.0, c.global_phase()));
  return v;
}

Circuit append_block(Circuit c, int control, int target) {
  if (control == target || control < 0 || target < 0 || control >= c.n_qubits() ||
      target >= c.n_qubits())
    throw ArgumentError("invalid building-block qubits (" + std::to_string(control) + ", " +
                        std::to_string(target) + ")");
  const int id = c.next_block_id();
  c.add(GateKind::U3, {control}, id);
  c.add(GateKind::U3, {target}, id);
  c.add(GateKind::CRY, {control, target}, id);
  return c;
}

BlockRemoval remove_block(const Circuit& c, int block_id) {
  bool found = false;
  std::vector<Gate> kept;
  std::vector<std::optional<int>> map(static_cast<std::size_t>(c.n_params()));
  int next = 0;
  for (const Gate& g : c.gates()) {
    if (g.block == block_id) {
      found = true;
      continue;
    }
    Gate h = g;
    for (int i = 0; i < g.param_count(); ++i) {
      auto& slot = h.slots[static_cast<std::size_t>(i)];
      map[static_cast<std::size_t>(slot)] = next;
      slot = next++;
    }
    kept.push_back(h);
  }
  if (!found) throw ArgumentError("unknown block id " + std::to_string(block_id));
  return {Circuit::from_gates(c.n_qubits(), std::move(kept), next, c.global_phase()), std::move(map)};
}

ParamVector remap_params(std::span<const double> params,
                         const std::vector<std::optional<int>>& slot_map, int new_size) {
  if (params.size() != slot_map.size()) throw ArgumentError("slot map does not match parameters");
  ParamVector out(static_cast<std::size_t>(new_size), 0.0);
  for (std::size_t i = 0; i < slot_map.size(); ++i)
    if (slot_map[i]) out[static_cast<std::size_t>(*slot_map[i])] = params[i];
  return out;
}

U3Angles u3_from_matrix(const LocalMatrix& m) {
  if (m.dim != 2) throw ArgumentError("u3_from_matrix expects a 2x2 matrix");
  const double c = std::abs(m(0, 0));
  const double s = std::abs(m(1, 0));
  U3Angles r;
  r.theta = 2.0 * std::atan2(s, c);
  constexpr double tiny = 1e-15;
  if (s < tiny) {
    r.phase = std::arg(m(0, 0));
    r.lambda = std::arg(m(1, 1)) - r.phase;
  } else if (c < tiny) {
    r.phase = std::arg(-m(0, 1));
    r.phi = std::arg(m(1, 0)) - r.phase;
  } else {
    r.phase = std::arg(m(0, 0));
    r.phi = std::arg(m(1, 0)) - r.phase;
    r.lambda = std::arg(-m(0, 1)) - r.phase;
  }
  return r;
}

namespace {

bool is_identity_up_to_phase(const LocalMatrix& m, double tol) {
  return std::abs(m(0, 1)) < tol && std::abs(m(1, 0)) < tol && std::abs(m(0, 0) - m(1, 1)) < tol;
}

}  // namespace

CircuitParams merge_single_qubit_runs(const Circuit& c, std::span<const double> params) {
  if (static_cast<int>(params.size()) != c.n_params()) throw ArgumentError("parameter length mismatch");
  const auto& gates = c.gates();
  const std::size_t m = gates.size();

  // run_of[i]: index of the run containing single-qubit gate i; runs close at
  // the next two-qubit gate touching the wire.
  std::vector<int> run_of(m, -1);
  std::vector<std::vector<std::size_t>> runs;
  std::vector<int> open(static_cast<std::size_t>(c.n_qubits()), -1);
  for (std::size_t i = 0; i < m; ++i) {
    const Gate& g = gates[i];
    if (g.arity() == 1) {
      auto& o = open[static_cast<std::size_t>(g.qubits[0])];
      if (o < 0) {
        o = static_cast<int>(runs.size());
        runs.emplace_back();
      }
      runs[static_cast<std::size_t>(o)].push_back(i);
      run_of[i] = o;
    } else {
      for (int q : g.qubit_list()) open[static_cast<std::size_t>(q)] = -1;
    }
  }

  std::vector<Gate> out;
  ParamVector out_params;
  double phase = c.global_phase();
  auto push = [&](Gate g, std::span<const double> values) {
    for (int i = 0; i < g.param_count(); ++i) {
      g.slots[static_cast<std::size_t>(i)] = static_cast<int>(out_params.size());
      out_params.push_back(values[static_cast<std::size_t>(i)]);
    }
    out.push_back(g);
  };

  for (std::size_t i = 0; i < m; ++i) {
    const Gate& g = gates[i];
    if (g.arity() == 2) {
      const auto v = gate_params(g, params);
      push(g, v);
      continue;
    }
    const auto& run = runs[static_cast<std::size_t>(run_of[i])];
    if (run.back() != i) continue;  // emitted at the position of the run's last gate

    std::optional<int> block;
    for (std::size_t j : run)
      if (gates[j].block) block = gates[j].block;

    if (run.size() == 1 && g.kind == GateKind::U3) {
      push(g, gate_params(g, params));
      continue;
    }
    LocalMatrix prod = LocalMatrix::identity(2);
    for (std::size_t j : run) prod = gate_local(gates[j], params) * prod;
    if (!block && is_identity_up_to_phase(prod, 1e-12)) {
      phase += std::arg(prod(0, 0));
      continue;
    }
    const U3Angles a = u3_from_matrix(prod);
    phase += a.phase;
    Gate u;
    u.kind = GateKind::U3;
    u.qubits = {g.qubits[0], 0};
    u.block = block;
    const std::array<double, 3> v{a.theta, a.phi, a.lambda};
    push(u, v);
  }
  const int np = static_cast<int>(out_params.size());
  return {Circuit::from_gates(c.n_qubits(), std::move(out), np, phase), std::move(out_params)};
}

CircuitParams inverse(const Circuit& c, std::span<const double> params) {
  Circuit r(c.n_qubits());
  ParamVector p;
  for (auto it = c.gates().rbegin(); it != c.gates().rend(); ++it) {
    const Gate& g = *it;
    const auto v = gate_params(g, params);
    GateKind kind = g.kind;
    if (kind == GateKind::S)
      kind = GateKind::Sdg;
    else if (kind == GateKind::Sdg)
      kind = GateKind::S;
    r.add(kind, g.qubit_list());
    switch (kind) {
      case GateKind::U3:
        p.insert(p.end(), {-v[0], -v[2], -v[1]});
        break;
      case GateKind::Ry:
      case GateKind::Rz:
      case GateKind::P:
      case GateKind::CRY:
        p.push_back(-v[0]);
        break;
      default:
        break;
    }
  }
  r.set_global_phase(-c.global_phase());
  return {std::move(r), std::move(p)};
}

}  // namespace crysynth
