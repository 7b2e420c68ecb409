#pragma once

#include "crysynth/circuit.hpp"

#include <string>
#include <string_view>

namespace crysynth {

struct QasmOptions {
  /// Emit CRY as its two-CNOT expansion instead of `cry`.
  bool expand_cry = false;
};

/// OPENQASM 2.0 text for the circuit; angles with 17 significant digits and a
/// `// global_phase: x` comment when the phase is nonzero.
std::string to_qasm(const Circuit& c, std::span<const double> params, const QasmOptions& opts = {});

/// Parses the supported OPENQASM 2.0 subset. Every numeric angle becomes a
/// fresh parameter slot. Throws ParseError on malformed input and
/// UnsupportedError on constructs outside the subset.
CircuitParams from_qasm(std::string_view text);

CircuitParams load_qasm(const std::string& path);
void save_qasm(const std::string& path, const Circuit& c, std::span<const double> params,
               const QasmOptions& opts = {});

}  // namespace crysynth
