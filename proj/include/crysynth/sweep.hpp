#pragma once

#include "crysynth/circuit.hpp"
#include "crysynth/cost.hpp"
#include "crysynth/synthesis.hpp"

#include <functional>
#include <string>
#include <vector>

namespace crysynth {

/// Tensor product of I/X/Y/Z. Text form lists the highest qubit first, so
/// "ZI" acts with Z on qubit 1.
class PauliString {
 public:
  /// ArgumentError on characters outside IXYZ or a length outside [1, 6].
  explicit PauliString(std::string_view text);

  int n_qubits() const { return static_cast<int>(ops_.size()); }
  /// operator on qubit q
  char op(int q) const { return ops_[static_cast<std::size_t>(q)]; }
  bool is_identity() const;
  std::string to_string() const;
  Matrix matrix() const;

 private:
  std::vector<char> ops_;  // indexed by qubit
};

/// exp(-i alpha/2 P). ArgumentError for the all-identity string.
Matrix pauli_exponential(const PauliString& ps, double alpha);

using Family = std::function<Matrix(double)>;

struct SweepTable {
  int n_qubits = 0;
  std::string structure_digest;
  double eps = 0.0;
  std::vector<double> alphas;
  std::vector<ParamVector> rows;
  /// Optional provenance for self-contained files: the Pauli string of the
  /// family and the structure as QASM. Empty when unknown.
  std::string family;
  std::string structure_qasm;
};

/// FNV-1a over gate kinds, qubits and slot order (angles excluded), as hex.
std::string structure_digest(const Circuit& structure);

struct SweepResult {
  ParamVector params;
  CostReport cost;
  int iterations = 0;
};

/// Solves every grid point in ascending order, each warm-started from the
/// previous row; the first row uses random multi-starts. Throws
/// SweepBuildError naming the first alpha that misses eps_success.
SweepTable build_sweep_table(const Family& family, const Circuit& structure, const std::vector<double>& grid,
                             const SynthesisConfig& cfg);

/// Angle-aware linear interpolation of the rows bracketing alpha; each
/// coordinate of the right row is first shifted by whole periods to lie
/// within half a period of the left one. Extrapolates up to one grid spacing
/// past either end (RangeError beyond).
ParamVector interpolate_params(const SweepTable& table, const Circuit& structure, double alpha);

/// Optimizes from the interpolated start. TableMismatchError on a digest
/// mismatch, RangeError out of range, SweepQueryError when eps is missed,
/// TableFormatError when a bracketing row no longer meets the table's eps.
SweepResult warm_synthesize(const Family& family, double alpha, const SweepTable& table,
                            const Circuit& structure, const SynthesisConfig& cfg);

/// Reference solve from random starts, for comparing iteration counts.
SweepResult cold_synthesize(const Family& family, double alpha, const Circuit& structure,
                            const SynthesisConfig& cfg);

void save_table(const std::string& path, const SweepTable& table);
void write_table(std::ostream& out, const SweepTable& table);
SweepTable read_table(std::istream& in);
/// With verify set, every row is checked against the embedded family and
/// structure (TableFormatError when one fails or the provenance is missing).
SweepTable load_table(const std::string& path, bool verify = false);

/// Structure embedded in a table file.
Circuit table_structure(const SweepTable& table);

}  // namespace crysynth
