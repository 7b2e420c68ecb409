#include "crysynth/cli.hpp"

#include "crysynth/cost.hpp"
#include "crysynth/errors.hpp"
#include "crysynth/lift.hpp"
#include "crysynth/qasm.hpp"
#include "crysynth/sweep.hpp"
#include "crysynth/synthesis.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace crysynth {

namespace {

using nlohmann::json;

struct SynthArgs {
  std::string coupling = "all";
  double tol = 1e-8;
  std::uint64_t seed = 0;
  int cells = 1;
  int max_cells = 0;
  int restarts = 3;
  int runs = 1;
  std::string out_path;
  std::string report_path;
};

void add_synth_options(CLI::App* cmd, SynthArgs& a, bool full) {
  cmd->add_option("--coupling", a.coupling, "'all' or an edge list such as 0-1,1-2")->capture_default_str();
  cmd->add_option("--tol", a.tol, "success threshold on the phase-aligned cost")->capture_default_str();
  cmd->add_option("--seed", a.seed, "base random seed")->capture_default_str();
  cmd->add_option("--out", a.out_path, "QASM output path");
  cmd->add_option("--report", a.report_path, "JSON report path");
  if (!full) return;
  cmd->add_option("--cells", a.cells, "initial unit cells")->capture_default_str();
  cmd->add_option("--max-cells", a.max_cells, "largest structure tried (0 = automatic)")->capture_default_str();
  cmd->add_option("--restarts", a.restarts, "random starts per cell count")->capture_default_str();
  cmd->add_option("--runs", a.runs, "independent runs with seeds seed, seed+1, ...")->capture_default_str();
}

SynthesisConfig make_config(const SynthArgs& a) {
  SynthesisConfig cfg;
  cfg.eps_success = a.tol;
  cfg.initial_cells = a.cells;
  cfg.max_cells = a.max_cells;
  cfg.growth_restarts = a.restarts;
  cfg.seed = a.seed;
  cfg.validate();
  return cfg;
}

json config_json(const SynthesisConfig& cfg, const CouplingGraph& g) {
  return {{"eps_success", cfg.eps_success},     {"initial_cells", cfg.initial_cells},
          {"max_cells", cfg.max_cells},         {"growth_restarts", cfg.growth_restarts},
          {"tol_class", cfg.tol_class},         {"max_rounds", cfg.max_rounds},
          {"pin_cnots", cfg.pin_cnots},         {"seed", cfg.seed},
          {"coupling", g.to_string()},          {"n_qubits", g.n_qubits()}};
}

json report_json(const SynthesisReport& r) {
  json j = {{"status", status_name(r.status)},
            {"seed", r.seed},
            {"cnot_count", r.cnot_count},
            {"single_qubit_count", r.single_qubit_count},
            {"f_aligned", r.f_aligned},
            {"f_raw", r.f_raw},
            {"fidelity_avg", r.fidelity_avg},
            {"fidelity_frob", r.fidelity_frob},
            {"wall_time", r.wall_time},
            {"cells", r.cells},
            {"removed_blocks", r.removed_blocks},
            {"global_phase", r.circuit.global_phase()},
            {"params", r.params}};
  if (r.status == SynthesisStatus::Ok) j["qasm"] = to_qasm(r.circuit, r.params);
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ArgumentError("cannot write " + path);
  f << text;
  if (!f) throw ArgumentError("write to " + path + " failed");
}

// Numbers with an optional "pi" factor: "1.5", "pi", "2pi", "-0.5pi".
double parse_angle(std::string s) {
  double scale = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    scale = std::numbers::pi;
    s.resize(s.size() - 2);
    if (!s.empty() && s.back() == '*') s.pop_back();
    if (s.empty() || s == "+") return scale;
    if (s == "-") return -scale;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ArgumentError("bad number '" + s + "'");
  return v * scale;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw ArgumentError("grid must be start:stop:count");
  const double start = parse_angle(parts[0]), stop = parse_angle(parts[1]);
  int count = 0;
  try {
    count = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw ArgumentError("bad grid count '" + parts[2] + "'");
  }
  if (count < 2) throw ArgumentError("grid needs at least two points");
  std::vector<double> grid;
  for (int i = 0; i < count; ++i) grid.push_back(start + (stop - start) * i / count);
  return grid;
}

int cmd_decompose(const std::string& path, const SynthArgs& a, std::ostream& out) {
  const Matrix u = load_unitary(path);
  const int n = qubits_for_dim(u.rows());
  const CouplingGraph g = CouplingGraph::parse(n, a.coupling);
  if (a.runs < 1) throw ArgumentError("--runs must be at least 1");
  SynthesisConfig base = make_config(a);

  std::vector<SynthesisReport> reports;
  json runs = json::array();
  for (int k = 0; k < a.runs; ++k) {
    SynthesisConfig cfg = base;
    cfg.seed = a.seed + static_cast<std::uint64_t>(k);
    try {
      reports.push_back(synthesize(u, g, cfg));
      runs.push_back(report_json(reports.back()));
    } catch (const FinalizeError& e) {
      runs.push_back({{"status", "finalize-failed"}, {"seed", cfg.seed}, {"f_aligned", e.best_cost()}});
    }
  }

  const SynthesisReport* best = nullptr;
  for (const auto& r : reports) {
    if (r.status != SynthesisStatus::Ok) continue;
    if (!best || std::tie(r.cnot_count, r.f_aligned, r.seed) < std::tie(best->cnot_count, best->f_aligned, best->seed))
      best = &r;
  }
  if (!a.report_path.empty()) {
    json doc = {{"command", "decompose"}, {"input", path}, {"config", config_json(base, g)}, {"runs", runs}};
    doc["best_seed"] = best ? json(best->seed) : json(nullptr);
    write_text(a.report_path, doc.dump(2) + "\n");
  }
  if (!best) {
    out << "no successful run out of " << a.runs << "\n";
    return 2;
  }
  if (!a.out_path.empty()) save_qasm(a.out_path, best->circuit, best->params);
  const auto ok = std::count_if(reports.begin(), reports.end(),
                                [](const SynthesisReport& r) { return r.status == SynthesisStatus::Ok; });
  out << "CNOT=" << best->cnot_count << " U3=" << best->single_qubit_count << " f_aligned=" << std::setprecision(3)
      << best->f_aligned << " seed=" << best->seed << " ok_runs=" << ok << "/" << a.runs << "\n";
  return 0;
}

int cmd_recompress(const std::string& path, const SynthArgs& a, std::ostream& out) {
  const CircuitParams in = load_qasm(path);
  const CouplingGraph g = CouplingGraph::parse(in.circuit.n_qubits(), a.coupling);
  const SynthesisConfig cfg = make_config(a);
  const RecompressReport r = recompress(in.circuit, in.params, g, cfg);
  if (!a.out_path.empty()) save_qasm(a.out_path, r.circuit, r.params);
  if (!a.report_path.empty()) {
    json doc = {{"command", "recompress"}, {"input", path}, {"config", config_json(cfg, g)}};
    json run = report_json(r);
    run["input_cnot_count"] = r.input_cnot_count;
    run["unchanged"] = r.unchanged;
    doc["runs"] = json::array({run});
    write_text(a.report_path, doc.dump(2) + "\n");
  }
  out << "CNOT " << r.input_cnot_count << " -> " << r.cnot_count << " f_aligned=" << std::setprecision(3)
      << r.f_aligned << (r.unchanged ? " (input kept)" : "") << "\n";
  return 0;
}

int cmd_eval(const std::string& qasm_path, const std::string& unitary_path, std::ostream& out) {
  const CircuitParams c = load_qasm(qasm_path);
  const Matrix u = load_unitary(unitary_path);
  const CostReport r = evaluate(u, c.circuit, c.params);
  out << std::setprecision(12);
  out << "f_raw " << r.f_raw << "\n";
  out << "f_aligned " << r.f_aligned << "\n";
  out << "c_hst " << r.c_hst << "\n";
  out << "fidelity_avg " << r.fidelity_avg << "\n";
  out << "fidelity_frob " << r.fidelity_frob << "\n";
  return 0;
}

struct SweepArgs {
  std::string pauli;
  std::string grid;
  std::string structure;
  std::string table;
  double alpha = 0.0;
  std::string alpha_text;
  std::string out_path;
  double tol = 1e-8;
  std::uint64_t seed = 0;
};

int cmd_sweep_build(const SweepArgs& a, std::ostream& out) {
  const PauliString ps(a.pauli);
  const Circuit structure = load_qasm(a.structure).circuit;
  if (structure.n_qubits() != ps.n_qubits()) throw ArgumentError("structure and Pauli string differ in qubit count");
  SynthesisConfig cfg;
  cfg.eps_success = a.tol;
  cfg.seed = a.seed;
  const Family family = [&](double x) { return pauli_exponential(ps, x); };
  SweepTable t = build_sweep_table(family, structure, parse_grid(a.grid), cfg);
  t.family = ps.to_string();
  if (a.table.empty())
    write_table(out, t);
  else {
    save_table(a.table, t);
    out << "built " << t.rows.size() << " rows for " << t.family << " digest " << t.structure_digest << "\n";
  }
  return 0;
}

int cmd_sweep_query(const SweepArgs& a, std::ostream& out) {
  const SweepTable t = load_table(a.table);
  if (t.family.empty()) throw TableFormatError("table does not name its family");
  const Circuit structure = table_structure(t);
  const PauliString ps(t.family);
  const Family family = [&](double x) { return pauli_exponential(ps, x); };
  SynthesisConfig cfg;
  cfg.eps_success = t.eps;
  cfg.seed = a.seed;
  const double alpha = parse_angle(a.alpha_text);
  const SweepResult r = warm_synthesize(family, alpha, t, structure, cfg);
  if (!a.out_path.empty()) save_qasm(a.out_path, structure, r.params);
  out << std::setprecision(17) << "alpha " << alpha << "\n";
  out << "f_aligned " << r.cost.f_aligned << "\n";
  out << "iterations " << r.iterations << "\n";
  out << "params";
  for (double v : r.params) out << ' ' << v;
  out << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unitary synthesis and circuit recompression with CRY building blocks", "crysynth"};
  app.require_subcommand(1);

  SynthArgs dec_args, rec_args;
  std::string dec_in, rec_in, eval_qasm, eval_unitary;
  auto* dec = app.add_subcommand("decompose", "synthesize a circuit for a unitary file");
  dec->add_option("unitary", dec_in, "unitary text file")->required();
  add_synth_options(dec, dec_args, true);

  auto* rec = app.add_subcommand("recompress", "shrink the CNOT count of a QASM circuit");
  rec->add_option("qasm", rec_in, "OPENQASM 2.0 input")->required();
  add_synth_options(rec, rec_args, false);

  auto* ev = app.add_subcommand("eval", "distance and fidelity of a circuit against a unitary");
  ev->add_option("qasm", eval_qasm)->required();
  ev->add_option("unitary", eval_unitary)->required();

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "parametric family tables");
  sweep->require_subcommand(1);
  auto* build = sweep->add_subcommand("build", "solve a Pauli-exponential family on a grid");
  build->add_option("pauli", sw.pauli, "Pauli string, highest qubit first")->required();
  build->add_option("--grid", sw.grid, "start:stop:count, stop excluded; 'pi' suffix allowed")->required();
  build->add_option("--structure", sw.structure, "QASM file fixing the circuit structure")->required();
  build->add_option("--table", sw.table, "output table (stdout when absent)");
  build->add_option("--tol", sw.tol)->capture_default_str();
  build->add_option("--seed", sw.seed)->capture_default_str();
  auto* query = sweep->add_subcommand("query", "warm-started solve at one alpha");
  query->add_option("--table", sw.table)->required();
  query->add_option("--alpha", sw.alpha_text)->required();
  query->add_option("--out", sw.out_path, "QASM output path");
  query->add_option("--seed", sw.seed)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*dec) return cmd_decompose(dec_in, dec_args, out);
    if (*rec) return cmd_recompress(rec_in, rec_args, out);
    if (*ev) return cmd_eval(eval_qasm, eval_unitary, out);
    if (*build) return cmd_sweep_build(sw, out);
    if (*query) return cmd_sweep_query(sw, out);
  } catch (const SweepBuildError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const SweepQueryError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace crysynth
