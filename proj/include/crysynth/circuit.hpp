#pragma once

#include "crysynth/gates.hpp"
#include "crysynth/linalg.hpp"

#include <array>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace crysynth {

using ParamVector = std::vector<double>;

/// One gate of a circuit. Angles live in the owning ParamVector; `slots`
/// holds the indices of this gate's angles there.
struct Gate {
  GateKind kind = GateKind::X;
  std::array<int, 2> qubits{};  // control first for two-qubit kinds
  std::array<int, 3> slots{};
  std::optional<int> block;

  int arity() const { return crysynth::arity(kind); }
  int param_count() const { return crysynth::param_count(kind); }
  std::span<const int> qubit_list() const {
    return {qubits.data(), static_cast<std::size_t>(arity())};
  }
  std::span<const int> slot_list() const {
    return {slots.data(), static_cast<std::size_t>(param_count())};
  }
  bool acts_on(int q) const { return qubits[0] == q || (arity() == 2 && qubits[1] == q); }
};

/// Ordered gate list; gates()[0] acts first. The circuit's operator is
/// e^{i*global_phase} * G_m ... G_1. Every parameter slot in [0, n_params)
/// belongs to exactly one gate; a block id tags one CRY and two U3 gates.
class Circuit {
 public:
  explicit Circuit(int n_qubits = 1);

  /// Builds a circuit from explicit gates; ArgumentError unless the slot and
  /// block invariants hold.
  static Circuit from_gates(int n_qubits, std::vector<Gate> gates, int n_params,
                            double global_phase = 0.0);

  int n_qubits() const { return n_qubits_; }
  int n_params() const { return n_params_; }
  double global_phase() const { return global_phase_; }
  void set_global_phase(double phase) { global_phase_ = phase; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }

  /// Appends a gate with fresh parameter slots and returns its index.
  std::size_t add(GateKind kind, std::span<const int> qubits, std::optional<int> block = {});
  std::size_t add(GateKind kind, std::initializer_list<int> qubits, std::optional<int> block = {}) {
    return add(kind, std::span<const int>(qubits.begin(), qubits.size()), block);
  }

  int next_block_id() const { return next_block_; }
  std::vector<int> block_ids() const;
  std::size_t count(GateKind kind) const;
  std::size_t two_qubit_count() const;

  /// Throws ArgumentError when an invariant is violated.
  void validate() const;

 private:
  int n_qubits_;
  int n_params_ = 0;
  int next_block_ = 0;
  double global_phase_ = 0.0;
  std::vector<Gate> gates_;
};

/// Angles of `g` gathered from `params`.
std::array<double, 3> gate_params(const Gate& g, std::span<const double> params);
LocalMatrix gate_local(const Gate& g, std::span<const double> params);

Matrix build_unitary(const Circuit& c, std::span<const double> params);

/// c extended by U3@control, U3@target, CRY(control, target) with seven fresh
/// slots and a fresh block id.
Circuit append_block(Circuit c, int control, int target);

struct BlockRemoval {
  Circuit circuit;
  /// old slot -> new slot; removed slots map to nothing
  std::vector<std::optional<int>> slot_map;
};

BlockRemoval remove_block(const Circuit& c, int block_id);

/// Carries surviving parameter values across a slot remap.
ParamVector remap_params(std::span<const double> params,
                         const std::vector<std::optional<int>>& slot_map, int new_size);

struct CircuitParams {
  Circuit circuit;
  ParamVector params;
};

/// U3 angles and phase with m = e^{i*phase} U3(theta, phi, lambda).
struct U3Angles {
  double theta = 0.0;
  double phi = 0.0;
  double lambda = 0.0;
  double phase = 0.0;
};

U3Angles u3_from_matrix(const LocalMatrix& m);

/// Replaces every maximal run of single-qubit gates on a wire by one U3
/// (dropping runs equal to the identity up to phase, unless block-tagged).
/// Residual phases go to the global phase, so build_unitary is unchanged.
CircuitParams merge_single_qubit_runs(const Circuit& c, std::span<const double> params);

/// Inverse circuit: reversed order, each gate replaced by its adjoint with
/// negated/permuted angles.
CircuitParams inverse(const Circuit& c, std::span<const double> params);

}  // namespace crysynth
