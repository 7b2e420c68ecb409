#include "crysynth/sweep.hpp"

#include "crysynth/errors.hpp"
#include "crysynth/qasm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

namespace crysynth {

namespace {

using std::numbers::pi;

constexpr std::string_view kMagic = "crysynth-sweep";
constexpr int kVersion = 1;

enum SeedTag : std::uint64_t { kFirstRow = 11, kRow = 12, kCold = 13, kQuery = 14 };

SweepResult optimize(const Matrix& target, const Circuit& c, ParamVector x0, OptimizerConfig opt, double eps,
                     std::uint64_t seed) {
  CostFunction f(target, c);
  opt.target_cost = eps;
  opt.seed = seed;
  const Objective obj = [&f](std::span<const double> x, std::span<double> g) {
    return f.value_and_gradient(x, g);
  };
  OptimizeResult r = minimize(obj, std::move(x0), opt);
  SweepResult out;
  out.cost = evaluate(target, c, r.x_best);
  out.params = std::move(r.x_best);
  out.iterations = r.iterations;
  return out;
}

std::vector<double> slot_periods(const Circuit& c) {
  std::vector<double> period(static_cast<std::size_t>(c.n_params()), 2 * pi);
  for (const Gate& g : c.gates())
    for (int s : g.slot_list()) period[static_cast<std::size_t>(s)] = angle_period(g.kind);
  return period;
}

std::uint64_t alpha_bits(double alpha) {
  std::uint64_t b = 0;
  static_assert(sizeof b == sizeof alpha);
  std::memcpy(&b, &alpha, sizeof b);
  return b;
}

void check_grid(const std::vector<double>& grid) {
  if (grid.size() < 2) throw ArgumentError("sweep grid needs at least two points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw ArgumentError("sweep grid contains a non-finite value");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ArgumentError("sweep grid must be strictly increasing");
  }
}

void check_digest(const SweepTable& table, const Circuit& structure) {
  if (table.structure_digest != structure_digest(structure))
    throw TableMismatchError("table digest " + table.structure_digest + " does not match structure " +
                             structure_digest(structure));
}

}  // namespace

PauliString::PauliString(std::string_view text) {
  if (text.empty() || static_cast<int>(text.size()) > kMaxQubits)
    throw ArgumentError("Pauli string length must lie in [1, 6]");
  for (auto it = text.rbegin(); it != text.rend(); ++it) {
    const char ch = static_cast<char>(std::toupper(static_cast<unsigned char>(*it)));
    if (ch != 'I' && ch != 'X' && ch != 'Y' && ch != 'Z')
      throw ArgumentError(std::string("invalid Pauli symbol '") + *it + "'");
    ops_.push_back(ch);
  }
}

bool PauliString::is_identity() const {
  return std::all_of(ops_.begin(), ops_.end(), [](char c) { return c == 'I'; });
}

std::string PauliString::to_string() const { return std::string(ops_.rbegin(), ops_.rend()); }

Matrix PauliString::matrix() const {
  Matrix m = Matrix::Identity(1, 1);
  // kron(a, b) puts a on the high qubits, so build from the top qubit down
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
    Matrix p(2, 2);
    switch (*it) {
      case 'I': p << 1, 0, 0, 1; break;
      case 'X': p << 0, 1, 1, 0; break;
      case 'Y': p << 0, cplx(0, -1), cplx(0, 1), 0; break;
      default: p << 1, 0, 0, -1; break;
    }
    m = kron(m, p);
  }
  return m;
}

Matrix pauli_exponential(const PauliString& ps, double alpha) {
  if (ps.is_identity()) throw ArgumentError("the all-identity Pauli string generates only a phase");
  const Matrix p = ps.matrix();
  return std::cos(alpha / 2) * Matrix::Identity(p.rows(), p.cols()) - cplx(0, std::sin(alpha / 2)) * p;
}

std::string structure_digest(const Circuit& structure) {
  std::ostringstream s;
  s << structure.n_qubits() << ';' << structure.n_params() << ';';
  for (const Gate& g : structure.gates()) {
    s << gate_name(g.kind);
    for (int q : g.qubit_list()) s << ',' << q;
    for (int slot : g.slot_list()) s << ':' << slot;
    s << ';';
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

SweepTable build_sweep_table(const Family& family, const Circuit& structure, const std::vector<double>& grid,
                             const SynthesisConfig& cfg) {
  cfg.validate();
  check_grid(grid);
  SweepTable table;
  table.n_qubits = structure.n_qubits();
  table.structure_digest = structure_digest(structure);
  table.eps = cfg.eps_success;
  table.structure_qasm = to_qasm(structure, ParamVector(static_cast<std::size_t>(structure.n_params()), 0.0));

  const SweepResult first = cold_synthesize(family, grid.front(), structure, cfg);
  if (first.cost.f_aligned > cfg.eps_success) throw SweepBuildError(grid.front(), first.cost.f_aligned);
  table.alphas.push_back(grid.front());
  table.rows.push_back(first.params);

  for (std::size_t i = 1; i < grid.size(); ++i) {
    SweepResult r = optimize(family(grid[i]), structure, table.rows.back(), cfg.compression_opt,
                             cfg.eps_success, derive_seed(cfg.seed, kRow, i));
    if (r.cost.f_aligned > cfg.eps_success) {
      // the warm path got stuck; fall back to fresh starts for this row
      SweepResult cold = cold_synthesize(family, grid[i], structure, cfg);
      if (cold.cost.f_aligned < r.cost.f_aligned) r = std::move(cold);
    }
    if (r.cost.f_aligned > cfg.eps_success) throw SweepBuildError(grid[i], r.cost.f_aligned);
    table.alphas.push_back(grid[i]);
    table.rows.push_back(r.params);
  }
  return table;
}

ParamVector interpolate_params(const SweepTable& table, const Circuit& structure, double alpha) {
  check_digest(table, structure);
  const auto& a = table.alphas;
  if (a.size() < 2 || table.rows.size() != a.size()) throw TableFormatError("table needs at least two rows");
  const double lo = a.front() - (a[1] - a[0]);
  const double hi = a.back() + (a.back() - a[a.size() - 2]);
  if (!(alpha >= lo && alpha <= hi))
    throw RangeError("alpha " + std::to_string(alpha) + " outside the table range [" + std::to_string(lo) +
                     ", " + std::to_string(hi) + "]");
  if (const auto hit = std::lower_bound(a.begin(), a.end(), alpha); hit != a.end() && *hit == alpha)
    return table.rows[static_cast<std::size_t>(hit - a.begin())];

  const auto upper = std::upper_bound(a.begin(), a.end(), alpha);
  std::size_t k = upper == a.begin() ? 0 : static_cast<std::size_t>(upper - a.begin()) - 1;
  k = std::min(k, a.size() - 2);
  const double w = (alpha - a[k]) / (a[k + 1] - a[k]);
  const ParamVector& left = table.rows[k];
  const ParamVector& right = table.rows[k + 1];
  const std::vector<double> period = slot_periods(structure);
  ParamVector out(left.size());
  for (std::size_t i = 0; i < left.size(); ++i) {
    const double p = period[i];
    const double aligned = right[i] - p * std::round((right[i] - left[i]) / p);
    out[i] = left[i] + w * (aligned - left[i]);
  }
  return out;
}

SweepResult warm_synthesize(const Family& family, double alpha, const SweepTable& table,
                            const Circuit& structure, const SynthesisConfig& cfg) {
  cfg.validate();
  check_digest(table, structure);
  ParamVector x0 = interpolate_params(table, structure, alpha);

  // rows are re-checked here rather than at load time
  const auto& a = table.alphas;
  const std::size_t k =
      std::min(static_cast<std::size_t>(std::max<std::ptrdiff_t>(
                   std::upper_bound(a.begin(), a.end(), alpha) - a.begin() - 1, 0)),
               a.size() - 2);
  for (std::size_t j : {k, k + 1}) {
    const double f = evaluate(family(a[j]), structure, table.rows[j]).f_aligned;
    if (f > table.eps * (1 + 1e-9))
      throw TableFormatError("row at alpha=" + std::to_string(a[j]) + " fails its threshold (cost " +
                             std::to_string(f) + ")");
  }

  SweepResult r = optimize(family(alpha), structure, std::move(x0), cfg.compression_opt, cfg.eps_success,
                           derive_seed(cfg.seed, kQuery, alpha_bits(alpha)));
  if (r.cost.f_aligned > cfg.eps_success)
    throw SweepQueryError("warm start at alpha=" + std::to_string(alpha) + " reached only " +
                          std::to_string(r.cost.f_aligned));
  return r;
}

SweepResult cold_synthesize(const Family& family, double alpha, const Circuit& structure,
                            const SynthesisConfig& cfg) {
  cfg.validate();
  const Matrix target = family(alpha);
  std::mt19937_64 rng(derive_seed(cfg.seed, kCold, alpha_bits(alpha)));
  std::uniform_real_distribution<double> angle(-pi, pi);
  SweepResult best;
  best.cost.f_aligned = std::numeric_limits<double>::infinity();
  int iterations = 0;
  const int attempts = std::max(cfg.growth_restarts, 10);
  for (int k = 0; k < attempts; ++k) {
    ParamVector x0(static_cast<std::size_t>(structure.n_params()));
    for (double& v : x0) v = angle(rng);
    SweepResult r = optimize(target, structure, std::move(x0), cfg.growth_opt, cfg.eps_success,
                             derive_seed(cfg.seed, kFirstRow, static_cast<std::uint64_t>(k)));
    iterations += r.iterations;
    if (r.cost.f_aligned < best.cost.f_aligned) best = std::move(r);
    if (best.cost.f_aligned <= cfg.eps_success) break;
  }
  best.iterations = iterations;
  return best;
}

void write_table(std::ostream& out, const SweepTable& table) {
  if (table.rows.size() != table.alphas.size()) throw ArgumentError("table rows and alphas differ in length");
  out << kMagic << ' ' << kVersion << '\n';
  out << "n_qubits " << table.n_qubits << '\n';
  out << "digest " << table.structure_digest << '\n';
  out << std::setprecision(17);
  out << "eps " << table.eps << '\n';
  out << "family " << (table.family.empty() ? "-" : table.family) << '\n';
  std::size_t lines = 0;
  for (char ch : table.structure_qasm) lines += ch == '\n';
  out << "structure " << lines << '\n' << table.structure_qasm;
  out << "rows " << table.rows.size() << '\n';
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    out << table.alphas[i];
    for (double v : table.rows[i]) out << ' ' << v;
    out << '\n';
  }
}

SweepTable read_table(std::istream& in) {
  auto fail = [](const std::string& what) -> TableFormatError { return TableFormatError("sweep table: " + what); };
  auto line_of = [&](std::string_view key) {
    std::string line;
    if (!std::getline(in, line)) throw fail("missing '" + std::string(key) + "' line");
    std::istringstream s(line);
    std::string k;
    s >> k;
    if (k != key) throw fail("expected '" + std::string(key) + "', found '" + k + "'");
    std::string rest;
    std::getline(s >> std::ws, rest);
    if (rest.empty()) throw fail("empty '" + std::string(key) + "' value");
    return rest;
  };
  auto number = [&](const std::string& text, std::string_view what) {
    std::istringstream s(text);
    double v = 0;
    if (!(s >> v) || !(s >> std::ws).eof()) throw fail("bad " + std::string(what) + " '" + text + "'");
    return v;
  };

  SweepTable t;
  const std::string magic = line_of(kMagic);
  if (number(magic, "version") != kVersion) throw fail("unsupported version " + magic);
  t.n_qubits = static_cast<int>(number(line_of("n_qubits"), "qubit count"));
  if (t.n_qubits < 1 || t.n_qubits > kMaxQubits) throw fail("qubit count out of range");
  t.structure_digest = line_of("digest");
  t.eps = number(line_of("eps"), "eps");
  t.family = line_of("family");
  if (t.family == "-") t.family.clear();
  const double lines = number(line_of("structure"), "structure length");
  for (int i = 0; i < static_cast<int>(lines); ++i) {
    std::string l;
    if (!std::getline(in, l)) throw fail("truncated structure");
    t.structure_qasm += l + '\n';
  }
  const double rows = number(line_of("rows"), "row count");
  if (rows < 0) throw fail("negative row count");
  for (int i = 0; i < static_cast<int>(rows); ++i) {
    std::string l;
    if (!std::getline(in, l)) throw fail("truncated: expected " + std::to_string(static_cast<int>(rows)) + " rows");
    std::istringstream s(l);
    double alpha = 0;
    if (!(s >> alpha)) throw fail("bad row " + std::to_string(i + 1));
    ParamVector row;
    for (double v; s >> v;) row.push_back(v);
    if (!s.eof()) throw fail("bad value in row " + std::to_string(i + 1));
    if (!t.rows.empty() && row.size() != t.rows.front().size()) throw fail("ragged row " + std::to_string(i + 1));
    if (!t.alphas.empty() && !(alpha > t.alphas.back())) throw fail("alphas not strictly increasing");
    t.alphas.push_back(alpha);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void save_table(const std::string& path, const SweepTable& table) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write " + path);
  write_table(out, table);
  if (!out) throw ArgumentError("write to " + path + " failed");
}

Circuit table_structure(const SweepTable& table) {
  if (table.structure_qasm.empty()) throw TableFormatError("table has no embedded structure");
  Circuit c = from_qasm(table.structure_qasm).circuit;
  // QASM drops block tags, which the digest ignores anyway
  if (structure_digest(c) != table.structure_digest)
    throw TableFormatError("embedded structure does not match the table digest");
  return c;
}

SweepTable load_table(const std::string& path, bool verify) {
  std::ifstream in(path);
  if (!in) throw TableFormatError("cannot read " + path);
  SweepTable t = read_table(in);
  if (verify) {
    if (t.family.empty()) throw TableFormatError("table has no family to verify against");
    const Circuit s = table_structure(t);
    const PauliString ps(t.family);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (static_cast<int>(t.rows[i].size()) != s.n_params()) throw TableFormatError("row length mismatch");
      const double f = evaluate(pauli_exponential(ps, t.alphas[i]), s, t.rows[i]).f_aligned;
      if (f > t.eps * (1 + 1e-9))
        throw TableFormatError("row at alpha=" + std::to_string(t.alphas[i]) + " fails its threshold");
    }
  }
  return t;
}

}  // namespace crysynth
