#pragma once

#include "crysynth/circuit.hpp"
#include "crysynth/cost.hpp"
#include "crysynth/optimizer.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crysynth {

/// Undirected qubit connectivity. Edges are stored as (min, max), sorted and
/// deduplicated.
class CouplingGraph {
 public:
  /// Throws ArgumentError on out-of-range, self-loop or disconnected input.
  CouplingGraph(int n_qubits, std::vector<std::pair<int, int>> edges);

  static CouplingGraph complete(int n_qubits);
  static CouplingGraph line(int n_qubits);
  /// "all" or an edge list such as "0-1,1-2".
  static CouplingGraph parse(int n_qubits, std::string_view text);

  int n_qubits() const { return n_qubits_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  bool allows(int a, int b) const;
  std::string to_string() const;

 private:
  int n_qubits_;
  std::vector<std::pair<int, int>> edges_;
};

struct SynthesisConfig {
  double eps_success = 1e-8;
  /// 0 selects default_max_cells()
  int max_cells = 0;
  int initial_cells = 1;
  /// random starts per cell count (one extra warm start is added when a
  /// smaller structure was tried before)
  int growth_restarts = 3;
  OptimizerConfig growth_opt = default_growth_opt();
  OptimizerConfig compression_opt = default_compression_opt();
  double tol_class = 1e-4;
  int max_rounds = 8;
  /// Try to replace each generic CRY by a single CNOT before expansion.
  bool pin_cnots = true;
  std::uint64_t seed = 0;

  void validate() const;

  static OptimizerConfig default_growth_opt();
  static OptimizerConfig default_compression_opt();
};

/// Cells of headroom above the generic two-qubit-gate count
/// ceil((4^n - 3n - 1) / 4), spread over `blocks_per_cell` blocks per cell.
int default_max_cells(int n_qubits, int blocks_per_cell);

enum class SynthesisStatus { Ok, InitFailed };

std::string_view status_name(SynthesisStatus s);

struct SynthesisReport {
  /// U3 and CNOT only; global phase set so that f_raw matches f_aligned.
  Circuit circuit;
  ParamVector params;
  int cnot_count = 0;
  int single_qubit_count = 0;
  double f_aligned = 0.0;
  double f_raw = 0.0;
  double fidelity_avg = 0.0;
  double fidelity_frob = 0.0;
  double wall_time = 0.0;
  std::uint64_t seed = 0;
  int cells = 0;
  int removed_blocks = 0;
  SynthesisStatus status = SynthesisStatus::Ok;
};

/// `cells` copies of one block per edge (edge order of g) plus one trailing
/// U3 per qubit.
Circuit build_initial_structure(int n, const CouplingGraph& g, int cells);

struct GrowthResult {
  Circuit circuit;
  ParamVector params;
  int cells = 0;
  double cost = 0.0;
};

/// Smallest cell count in [initial_cells, max_cells] whose structure reaches
/// eps_success. Throws InitFailedError with the best cost otherwise.
GrowthResult grow_and_solve(const Matrix& target, const CouplingGraph& g, const SynthesisConfig& cfg);

struct CompressResult {
  Circuit circuit;
  ParamVector params;
  int removed = 0;
  int rounds = 0;
  /// CRY count after each round
  std::vector<int> cry_history;
};

/// Removes building blocks while the cost stays within eps_success.
CompressResult compress(const Matrix& target, const Circuit& c, const ParamVector& p,
                        const SynthesisConfig& cfg);

/// Expands every CRY into CNOTs and single-qubit gates and re-optimizes the
/// single-qubit angles. Throws FinalizeError if the cost cannot be restored.
SynthesisReport finalize(const Matrix& target, const Circuit& c, const ParamVector& p,
                         const SynthesisConfig& cfg);

/// grow_and_solve, compress and finalize. A failed growth phase yields status
/// InitFailed with an empty circuit and the best cost reached.
SynthesisReport synthesize(const Matrix& target, const CouplingGraph& g, const SynthesisConfig& cfg);

/// Number of CNOTs a CRY at this angle expands to (0, 1 or 2).
int cry_cnot_cost(double theta, double tol);

/// Seed for the `index`-th stream of kind `tag` derived from `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index);

}  // namespace crysynth
