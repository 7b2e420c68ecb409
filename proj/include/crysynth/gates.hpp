#pragma once

#include "crysynth/linalg.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace crysynth {

enum class GateKind { U3, Ry, Rz, P, H, X, Z, S, Sdg, CRY, CNOT, CZ };

int param_count(GateKind kind);
int arity(GateKind kind);
inline bool is_parametric(GateKind kind) { return param_count(kind) > 0; }
inline bool is_two_qubit(GateKind kind) { return arity(kind) == 2; }

/// Lower-case mnemonic ("u3", "cry", "cnot", ...).
std::string_view gate_name(GateKind kind);
std::optional<GateKind> gate_kind_from_name(std::string_view name);

/// Period of a parameter of `kind` modulo which the circuit's phase-aligned
/// action is unchanged (2*pi for single-qubit angles, 4*pi for CRY).
double angle_period(GateKind kind);

// Matrix conventions:
//   Ry(t)  = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]
//   Rz(t)  = diag(e^{-it/2}, e^{it/2})
//   P(l)   = diag(1, e^{il})
//   U3(t,p,l) = [[cos t/2, -e^{il} sin t/2], [e^{ip} sin t/2, e^{i(p+l)} cos t/2]]
//   CRY(t) = |0><0| (x) I + |1><1| (x) Ry(t), control is the first qubit
//   CNOT   = |0><0| (x) I + |1><1| (x) X
//   CZ     = diag(1, 1, 1, -1)
LocalMatrix gate_local(GateKind kind, std::span<const double> params);
LocalMatrix gate_local_derivative(GateKind kind, std::span<const double> params, int idx);

Matrix gate_matrix(GateKind kind, std::span<const double> params);
Matrix gate_derivative(GateKind kind, std::span<const double> params, int idx);

enum class CryClass { Trivial, ControlZ, SingleCnot, Generic };

std::string_view cry_class_name(CryClass klass);

/// Trivial: CRY ~ I; ControlZ: CRY ~ Z on the control; SingleCnot: theta ~ pi
/// mod 2*pi; Generic otherwise.
CryClass classify_cry(double theta, double tol);

/// CRY angle moved onto the exact special value of its class (mod 4*pi,
/// result in [0, 4*pi)); Generic angles are returned unchanged.
double snap_cry_angle(double theta, CryClass klass);

/// A gate with concrete angles, independent of any circuit.
struct BoundGate {
  GateKind kind;
  std::vector<int> qubits;
  std::vector<double> params;
};

/// Gate sequence (temporal order) whose product equals CRY(theta) exactly.
/// Special classes expand at the snapped angle; InternalError when `klass`
/// does not match classify_cry(theta, tol).
std::vector<BoundGate> expand_cry(double theta, int control, int target, CryClass klass,
                                  double tol = 1e-4);

}  // namespace crysynth
