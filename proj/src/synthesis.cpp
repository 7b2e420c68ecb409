#include "crysynth/synthesis.hpp"

#include "crysynth/errors.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace crysynth {

namespace {

using std::numbers::pi;

enum SeedTag : std::uint64_t { kGrowth = 1, kRemovalOrder = 2, kRemovalOpt = 3, kFinalize = 4, kTrivial = 5 };

std::pair<int, int> normalized(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

bool is_connected(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> parent(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  int components = n;
  for (auto [a, b] : edges) {
    const int ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[static_cast<std::size_t>(ra)] = rb;
      --components;
    }
  }
  return components <= 1;
}

struct Solved {
  ParamVector x;
  double f = 0.0;
  int iterations = 0;
};

Solved solve(const Matrix& target, const Circuit& c, ParamVector x0, OptimizerConfig opt, double eps,
             std::uint64_t seed) {
  CostFunction f(target, c);
  opt.target_cost = eps;
  opt.seed = seed;
  const Objective obj = [&f](std::span<const double> x, std::span<double> g) {
    return f.value_and_gradient(x, g);
  };
  OptimizeResult r = minimize(obj, std::move(x0), opt);
  return {std::move(r.x_best), r.f_best, r.iterations};
}

double aligned_cost(const Matrix& target, const Circuit& c, const ParamVector& p) {
  return CostFunction(target, c).value(p);
}

std::vector<std::size_t> cry_indices(const Circuit& c) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.gates()[i].kind == GateKind::CRY) out.push_back(i);
  return out;
}

double cry_angle(const Circuit& c, const ParamVector& p, std::size_t i) {
  return p[static_cast<std::size_t>(c.gates()[i].slots[0])];
}

// Substitutes gate lists for the given CRY gates, untags their blocks and
// merges the single-qubit runs this leaves behind.
CircuitParams replace_crys(const Circuit& c, const ParamVector& p,
                           const std::map<std::size_t, std::vector<BoundGate>>& repl) {
  std::set<int> cleared;
  for (const auto& [i, _] : repl)
    if (c.gates()[i].block) cleared.insert(*c.gates()[i].block);
  Circuit out(c.n_qubits());
  ParamVector q;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (auto it = repl.find(i); it != repl.end()) {
      for (const BoundGate& b : it->second) {
        out.add(b.kind, std::span<const int>(b.qubits), {});
        q.insert(q.end(), b.params.begin(), b.params.end());
      }
      continue;
    }
    const Gate& g = c.gates()[i];
    std::optional<int> block = g.block;
    if (block && cleared.count(*block)) block.reset();
    out.add(g.kind, g.qubit_list(), block);
    const auto v = gate_params(g, p);
    q.insert(q.end(), v.begin(), v.begin() + g.param_count());
  }
  out.set_global_phase(c.global_phase());
  out.validate();
  return merge_single_qubit_runs(out, q);
}

std::vector<BoundGate> snapped_expansion(const Gate& g, double theta, double tol) {
  const CryClass k = classify_cry(theta, tol);
  return expand_cry(snap_cry_angle(theta, k), g.qubits[0], g.qubits[1], k, tol);
}

// Removes U3 gates within `tol` of the identity up to phase.
CircuitParams drop_near_identity(const Circuit& c, const ParamVector& p, double tol) {
  Circuit out(c.n_qubits());
  ParamVector q;
  double phase = c.global_phase();
  for (const Gate& g : c.gates()) {
    const auto v = gate_params(g, p);
    if (g.kind == GateKind::U3 && !g.block) {
      const LocalMatrix m = gate_local(g, p);
      if (std::abs(m(0, 1)) < tol && std::abs(m(1, 0)) < tol && std::abs(m(0, 0) - m(1, 1)) < tol) {
        phase += std::arg(m(0, 0));
        continue;
      }
    }
    out.add(g.kind, g.qubit_list(), g.block);
    q.insert(q.end(), v.begin(), v.begin() + g.param_count());
  }
  out.set_global_phase(phase);
  return {std::move(out), std::move(q)};
}

}  // namespace

CouplingGraph::CouplingGraph(int n_qubits, std::vector<std::pair<int, int>> edges)
    : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw ArgumentError("qubit count " + std::to_string(n_qubits) + " outside [1, 6]");
  for (auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n_qubits || b >= n_qubits)
      throw ArgumentError("edge " + std::to_string(a) + "-" + std::to_string(b) + " out of range");
    if (a == b) throw ArgumentError("self-loop on qubit " + std::to_string(a));
    std::tie(a, b) = normalized(a, b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (!is_connected(n_qubits, edges)) throw ArgumentError("coupling graph is disconnected");
  edges_ = std::move(edges);
}

CouplingGraph CouplingGraph::complete(int n_qubits) {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < n_qubits; ++a)
    for (int b = a + 1; b < n_qubits; ++b) e.emplace_back(a, b);
  return CouplingGraph(n_qubits, std::move(e));
}

CouplingGraph CouplingGraph::line(int n_qubits) {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a + 1 < n_qubits; ++a) e.emplace_back(a, a + 1);
  return CouplingGraph(n_qubits, std::move(e));
}

CouplingGraph CouplingGraph::parse(int n_qubits, std::string_view text) {
  if (text == "all") return complete(n_qubits);
  std::vector<std::pair<int, int>> e;
  auto number = [&](std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      throw ArgumentError("bad qubit index '" + std::string(s) + "' in coupling list");
    return v;
  };
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    const std::size_t dash = item.find('-');
    if (dash == std::string_view::npos) throw ArgumentError("bad edge '" + std::string(item) + "'");
    e.emplace_back(number(item.substr(0, dash)), number(item.substr(dash + 1)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return CouplingGraph(n_qubits, std::move(e));
}

bool CouplingGraph::allows(int a, int b) const {
  return std::binary_search(edges_.begin(), edges_.end(), normalized(a, b));
}

std::string CouplingGraph::to_string() const {
  std::string s;
  for (auto [a, b] : edges_) {
    if (!s.empty()) s += ',';
    s += std::to_string(a) + "-" + std::to_string(b);
  }
  return s;
}

OptimizerConfig SynthesisConfig::default_growth_opt() {
  OptimizerConfig o;
  o.max_iters = 3000;
  o.restart_count = 0;
  o.f_tol = 1e-11;
  o.stall_iters = 30;
  return o;
}

OptimizerConfig SynthesisConfig::default_compression_opt() {
  OptimizerConfig o;
  o.max_iters = 2000;
  o.restart_count = 2;
  o.perturbation_scale = 0.3;
  o.f_tol = 1e-11;
  o.stall_iters = 30;
  return o;
}

void SynthesisConfig::validate() const {
  if (!(eps_success > 0.0)) throw ArgumentError("eps_success must be positive");
  if (initial_cells < 1) throw ArgumentError("initial_cells must be at least 1");
  if (max_cells != 0 && max_cells < initial_cells) throw ArgumentError("max_cells below initial_cells");
  if (growth_restarts < 1) throw ArgumentError("growth_restarts must be at least 1");
  if (!(tol_class > 0.0 && tol_class <= 0.1)) throw ArgumentError("tol_class must lie in (0, 0.1]");
  if (max_rounds < 0) throw ArgumentError("max_rounds must be non-negative");
  growth_opt.validate();
  compression_opt.validate();
}

int default_max_cells(int n_qubits, int blocks_per_cell) {
  if (blocks_per_cell <= 0) return 1;
  const long long full = (1LL << (2 * n_qubits)) - 3LL * n_qubits - 1;
  const long long needed = (full + 3) / 4;
  return static_cast<int>((needed + blocks_per_cell - 1) / blocks_per_cell) + 2;
}

std::string_view status_name(SynthesisStatus s) {
  return s == SynthesisStatus::Ok ? "ok" : "init-failed";
}

int cry_cnot_cost(double theta, double tol) {
  switch (classify_cry(theta, tol)) {
    case CryClass::Trivial:
    case CryClass::ControlZ: return 0;
    case CryClass::SingleCnot: return 1;
    case CryClass::Generic: return 2;
  }
  return 2;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag * 0x100000001ULL + index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Circuit build_initial_structure(int n, const CouplingGraph& g, int cells) {
  if (g.n_qubits() != n) throw ArgumentError("coupling graph qubit count does not match");
  if (cells < 1) throw ArgumentError("cell count must be at least 1");
  Circuit c(n);
  for (int cell = 0; cell < cells; ++cell)
    for (auto [a, b] : g.edges()) c = append_block(std::move(c), a, b);
  for (int q = 0; q < n; ++q) c.add(GateKind::U3, {q});
  return c;
}

GrowthResult grow_and_solve(const Matrix& target, const CouplingGraph& g, const SynthesisConfig& cfg) {
  cfg.validate();
  const int n = g.n_qubits();
  if (target.rows() != (1 << n) || target.cols() != (1 << n))
    throw ArgumentError("target dimension does not match the coupling graph");
  const int per_cell = static_cast<int>(g.edges().size());
  const int max_cells = cfg.max_cells > 0 ? cfg.max_cells : default_max_cells(n, per_cell);
  const int cell_params = 7 * per_cell, tail = 3 * n;

  std::optional<GrowthResult> prev;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int cells = cfg.initial_cells; cells <= max_cells; ++cells) {
    const Circuit c = build_initial_structure(n, g, cells);
    const auto np = static_cast<std::size_t>(c.n_params());
    std::mt19937_64 rng(derive_seed(cfg.seed, kGrowth, static_cast<std::uint64_t>(cells)));
    std::uniform_real_distribution<double> angle(-pi, pi);

    GrowthResult here{c, {}, cells, std::numeric_limits<double>::infinity()};
    for (int k = 0; k < cfg.growth_restarts; ++k) {
      ParamVector x0(np);
      if (k == 0 && prev) {
        const auto shared = static_cast<std::size_t>(prev->cells * cell_params);
        std::copy_n(prev->params.begin(), shared, x0.begin());
        std::fill(x0.begin() + static_cast<std::ptrdiff_t>(shared), x0.end() - tail, 0.0);
        std::copy(prev->params.end() - tail, prev->params.end(), x0.end() - tail);
      } else {
        for (double& v : x0) v = angle(rng);
      }
      Solved s = solve(target, c, std::move(x0), cfg.growth_opt, cfg.eps_success,
                       derive_seed(cfg.seed, kGrowth, static_cast<std::uint64_t>(cells * 1000 + k)));
      if (s.f < here.cost) {
        here.cost = s.f;
        here.params = std::move(s.x);
      }
      if (here.cost <= cfg.eps_success) {
        // converge fully so later stages start with margin below the threshold
        OptimizerConfig polish = cfg.growth_opt;
        polish.restart_count = 0;
        Solved p = solve(target, c, here.params, polish, -std::numeric_limits<double>::infinity(), 0);
        if (p.f < here.cost) {
          here.cost = p.f;
          here.params = std::move(p.x);
        }
        return here;
      }
    }
    best_cost = std::min(best_cost, here.cost);
    prev = std::move(here);
    if (n == 1) break;  // extra cells add nothing without edges
  }
  throw InitFailedError("no structure up to " + std::to_string(max_cells) + " cells reached the threshold",
                        best_cost);
}

CompressResult compress(const Matrix& target, const Circuit& c, const ParamVector& p,
                        const SynthesisConfig& cfg) {
  cfg.validate();
  const double eps = cfg.eps_success;
  if (aligned_cost(target, c, p) > eps) throw ArgumentError("compress needs a circuit within eps_success");

  CompressResult r{c, p, 0, 0, {}};
  std::uint64_t trial = 0;
  for (int round = 0; round < cfg.max_rounds; ++round) {
    int removed = 0;

    std::map<std::size_t, std::vector<BoundGate>> trivial;
    for (std::size_t i : cry_indices(r.circuit)) {
      const double th = cry_angle(r.circuit, r.params, i);
      const CryClass k = classify_cry(th, cfg.tol_class);
      if (k == CryClass::Trivial || k == CryClass::ControlZ)
        trivial[i] = snapped_expansion(r.circuit.gates()[i], th, cfg.tol_class);
    }
    if (!trivial.empty()) {
      CircuitParams cand = replace_crys(r.circuit, r.params, trivial);
      Solved s = solve(target, cand.circuit, std::move(cand.params), cfg.compression_opt, eps,
                       derive_seed(cfg.seed, kTrivial, static_cast<std::uint64_t>(round)));
      if (s.f <= eps) {
        r.circuit = std::move(cand.circuit);
        r.params = std::move(s.x);
        removed += static_cast<int>(trivial.size());
      }
    }

    std::vector<int> order = r.circuit.block_ids();
    std::mt19937_64 rng(derive_seed(cfg.seed, kRemovalOrder, static_cast<std::uint64_t>(round)));
    std::shuffle(order.begin(), order.end(), rng);
    for (int id : order) {
      BlockRemoval rm = remove_block(r.circuit, id);
      ParamVector x0 = remap_params(r.params, rm.slot_map, rm.circuit.n_params());
      Solved s = solve(target, rm.circuit, std::move(x0), cfg.compression_opt, eps,
                       derive_seed(cfg.seed, kRemovalOpt, trial++));
      if (s.f <= eps) {
        r.circuit = std::move(rm.circuit);
        r.params = std::move(s.x);
        ++removed;
      }
    }
    r.removed += removed;
    r.rounds = round + 1;
    r.cry_history.push_back(static_cast<int>(r.circuit.count(GateKind::CRY)));
    if (removed == 0) break;
  }
  return r;
}

SynthesisReport finalize(const Matrix& target, const Circuit& c, const ParamVector& p,
                         const SynthesisConfig& cfg) {
  cfg.validate();
  const double eps = cfg.eps_success, tol = cfg.tol_class;
  if (aligned_cost(target, c, p) > eps) throw ArgumentError("finalize needs a circuit within eps_success");
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t trial = 0;
  auto next_seed = [&] { return derive_seed(cfg.seed, kFinalize, trial++); };

  Circuit cur = c;
  ParamVector par = p;

  // Snap the non-generic CRYs first; generic ones keep their free angle.
  std::map<std::size_t, std::vector<BoundGate>> snaps;
  for (std::size_t i : cry_indices(cur)) {
    const double th = cry_angle(cur, par, i);
    if (classify_cry(th, tol) != CryClass::Generic) snaps[i] = snapped_expansion(cur.gates()[i], th, tol);
  }
  if (!snaps.empty()) {
    CircuitParams cand = replace_crys(cur, par, snaps);
    Solved s = solve(target, cand.circuit, std::move(cand.params), cfg.compression_opt, eps, next_seed());
    if (s.f > eps) throw FinalizeError("cost exceeds threshold after snapping CRY angles", s.f);
    cur = std::move(cand.circuit);
    par = std::move(s.x);
  }

  // A generic CRY costs two CNOTs; try to make do with one.
  if (cfg.pin_cnots) {
    // a successful pin removes the CRY, so position k then holds the next one
    for (std::size_t k = 0;;) {
      const auto crys = cry_indices(cur);
      if (k >= crys.size()) break;
      const Gate& g = cur.gates()[crys[k]];
      std::map<std::size_t, std::vector<BoundGate>> pin{
          {crys[k], expand_cry(pi, g.qubits[0], g.qubits[1], CryClass::SingleCnot, tol)}};
      CircuitParams cand = replace_crys(cur, par, pin);
      Solved s = solve(target, cand.circuit, std::move(cand.params), cfg.compression_opt, eps, next_seed());
      if (s.f <= eps) {
        cur = std::move(cand.circuit);
        par = std::move(s.x);
      } else {
        ++k;
      }
    }
  }

  std::map<std::size_t, std::vector<BoundGate>> rest;
  for (std::size_t i : cry_indices(cur))
    rest[i] = snapped_expansion(cur.gates()[i], cry_angle(cur, par, i), tol);
  CircuitParams flat = replace_crys(cur, par, rest);
  Solved s = solve(target, flat.circuit, std::move(flat.params), cfg.compression_opt, eps, next_seed());
  if (s.f > eps) throw FinalizeError("final single-qubit optimization missed the threshold", s.f);

  // Past the threshold, run on to convergence, then drop U3s that ended up
  // next to the identity if the cost allows.
  OptimizerConfig polish = cfg.compression_opt;
  polish.restart_count = 0;
  constexpr double kNoTarget = -std::numeric_limits<double>::infinity();
  if (Solved t = solve(target, flat.circuit, s.x, polish, kNoTarget, next_seed()); t.f < s.f) s = std::move(t);
  if (CircuitParams slim = drop_near_identity(flat.circuit, s.x, 1e-6); slim.circuit.size() < flat.circuit.size()) {
    Solved t = solve(target, slim.circuit, std::move(slim.params), polish, kNoTarget, next_seed());
    if (t.f <= eps) {
      flat.circuit = std::move(slim.circuit);
      s = std::move(t);
    }
  }

  SynthesisReport out;
  out.circuit = std::move(flat.circuit);
  out.params = std::move(s.x);
  {
    CostFunction f(target, out.circuit);
    const cplx t = f.trace(out.params);
    out.circuit.set_global_phase(out.circuit.global_phase() - std::arg(t));
  }
  const CostReport rep = evaluate(target, out.circuit, out.params);
  out.cnot_count = static_cast<int>(out.circuit.count(GateKind::CNOT));
  out.single_qubit_count = static_cast<int>(out.circuit.size()) - out.cnot_count;
  out.f_aligned = rep.f_aligned;
  out.f_raw = rep.f_raw;
  out.fidelity_avg = rep.fidelity_avg;
  out.fidelity_frob = rep.fidelity_frob;
  out.seed = cfg.seed;
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

SynthesisReport synthesize(const Matrix& target, const CouplingGraph& g, const SynthesisConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  GrowthResult grown;
  try {
    grown = grow_and_solve(target, g, cfg);
  } catch (const InitFailedError& e) {
    SynthesisReport r;
    r.circuit = Circuit(g.n_qubits());
    const CostReport rep = make_report(cplx(static_cast<double>(target.rows()) - e.best_cost(), 0.0),
                                       static_cast<int>(target.rows()));
    r.f_aligned = e.best_cost();
    r.f_raw = rep.f_raw;
    r.fidelity_avg = rep.fidelity_avg;
    r.fidelity_frob = rep.fidelity_frob;
    r.seed = cfg.seed;
    r.status = SynthesisStatus::InitFailed;
    r.wall_time = elapsed();
    return r;
  }
  const CompressResult comp = compress(target, grown.circuit, grown.params, cfg);
  SynthesisReport r = finalize(target, comp.circuit, comp.params, cfg);
  r.cells = grown.cells;
  r.removed_blocks = comp.removed;
  r.wall_time = elapsed();
  return r;
}

}  // namespace crysynth
