#pragma once

#include "crysynth/circuit.hpp"
#include "crysynth/synthesis.hpp"

namespace crysynth {

/// Rewrites CNOT and CZ as dressed CRY(pi) gates, merges single-qubit runs to
/// U3 and tags every CRY as a block with the U3s directly before it on its two
/// wires (identity U3s are inserted where a wire has none). The unitary,
/// global phase included, is unchanged.
CircuitParams lift_circuit(const Circuit& c, std::span<const double> params);

/// CNOTs the input costs: one per cx or cz, 0 to 2 per cry by angle class.
int two_qubit_cost(const Circuit& c, std::span<const double> params, double tol_class);

struct RecompressReport : SynthesisReport {
  int input_cnot_count = 0;
  /// true when no smaller circuit was found and the input came back as is
  bool unchanged = false;
};

/// Lifts the circuit, compresses it against its own unitary and finalizes.
/// Two-qubit gates must sit on edges of g (ArgumentError otherwise). Returns
/// the input untouched when the result would not use fewer CNOTs.
RecompressReport recompress(const Circuit& c, std::span<const double> params, const CouplingGraph& g,
                            const SynthesisConfig& cfg);

/// Unitary form: plain synthesis.
SynthesisReport recompress(const Matrix& target, const CouplingGraph& g, const SynthesisConfig& cfg);

}  // namespace crysynth
