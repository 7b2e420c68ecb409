#include "crysynth/errors.hpp"
#include "crysynth/sweep.hpp"

#include "gtest/gtest.h"
#include "test_util.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

using namespace crysynth;
using std::numbers::pi;

namespace {

// exp(-i a/2 P) summed as a power series
Matrix series_exponential(const Matrix& p, double alpha) {
  const Matrix x = cplx(0, -alpha / 2) * p;
  Matrix term = Matrix::Identity(p.rows(), p.cols()), sum = term;
  for (int k = 1; k < 60; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

std::vector<double> uniform_grid(int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(2 * pi * i / count);
  return g;
}

struct ZZFixture : ::testing::Test {
  PauliString zz{"ZZ"};
  Family family = [this](double a) { return pauli_exponential(zz, a); };
  Circuit structure = build_initial_structure(2, CouplingGraph::complete(2), 2);
  SynthesisConfig cfg;
};

}  // namespace

TEST(pauli, parse_and_order) {
  const PauliString ps("XIZ");
  EXPECT_EQ(ps.n_qubits(), 3);
  EXPECT_EQ(ps.op(0), 'Z');
  EXPECT_EQ(ps.op(2), 'X');
  EXPECT_EQ(ps.to_string(), "XIZ");
  Matrix z(2, 2), i2 = Matrix::Identity(2, 2);
  z << 1, 0, 0, -1;
  EXPECT_LT(max_abs_diff(PauliString("ZI").matrix(), kron(z, i2)), 1e-15);
  EXPECT_THROW(PauliString("ZA"), ArgumentError);
  EXPECT_THROW(PauliString(""), ArgumentError);
  EXPECT_THROW(pauli_exponential(PauliString("II"), 0.3), ArgumentError);
}

TEST(pauli, exponential_examples) {
  EXPECT_LT(max_abs_diff(pauli_exponential(PauliString("XY"), 0.0), Matrix::Identity(4, 4)), 1e-15);
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = cplx(0, -1);
  expected(1, 1) = cplx(0, 1);
  EXPECT_LT(max_abs_diff(pauli_exponential(PauliString("Z"), pi), expected), 1e-15);
}

TEST(pauli, closed_form_matches_series) {
  std::mt19937_64 rng(61);
  const std::string symbols = "IXYZ";
  std::uniform_real_distribution<double> angle(-2 * pi, 2 * pi);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 4;
    std::string s;
    do {
      s.clear();
      for (int q = 0; q < n; ++q) s += symbols[rng() % 4];
    } while (s.find_first_not_of('I') == std::string::npos);
    const PauliString ps(s);
    const double a = angle(rng), b = angle(rng);
    const Matrix e = pauli_exponential(ps, a);
    EXPECT_LT(max_abs_diff(e, series_exponential(ps.matrix(), a)), 1e-10) << s;
    EXPECT_LT(unitarity_residual(e), 1e-12);
    EXPECT_LT(max_abs_diff(e * pauli_exponential(ps, b), pauli_exponential(ps, a + b)), 1e-12);
  }
}

TEST(digest, binds_structure_not_angles) {
  const Circuit a = build_initial_structure(2, CouplingGraph::complete(2), 2);
  const Circuit b = build_initial_structure(2, CouplingGraph::complete(2), 2);
  const Circuit c = build_initial_structure(2, CouplingGraph::complete(2), 1);
  EXPECT_EQ(structure_digest(a), structure_digest(b));
  EXPECT_NE(structure_digest(a), structure_digest(c));
  EXPECT_EQ(structure_digest(a).size(), 16u);
}

TEST_F(ZZFixture, build_meets_eps_on_every_row) {
  const SweepTable t = build_sweep_table(family, structure, uniform_grid(17), cfg);
  ASSERT_EQ(t.rows.size(), 17u);
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    EXPECT_LE(evaluate(family(t.alphas[i]), structure, t.rows[i]).f_aligned, 1e-8);
  EXPECT_TRUE(std::is_sorted(t.alphas.begin(), t.alphas.end()));
}

TEST_F(ZZFixture, rejects_bad_grids) {
  EXPECT_THROW(build_sweep_table(family, structure, {0.5}, cfg), ArgumentError);
  EXPECT_THROW(build_sweep_table(family, structure, {0.5, 0.5}, cfg), ArgumentError);
  EXPECT_THROW(build_sweep_table(family, structure, {0.5, 0.1}, cfg), ArgumentError);
}

TEST_F(ZZFixture, warm_queries) {
  const SweepTable t = build_sweep_table(family, structure, uniform_grid(16), cfg);

  const SweepResult on_grid = warm_synthesize(family, t.alphas[5], t, structure, cfg);
  EXPECT_EQ(on_grid.params, t.rows[5]);
  EXPECT_EQ(on_grid.iterations, 0);

  const SweepResult mid = warm_synthesize(family, 0.5 * (t.alphas[3] + t.alphas[4]), t, structure, cfg);
  EXPECT_LE(mid.cost.f_aligned, 1e-8);

  const double spacing = t.alphas[1] - t.alphas[0];
  EXPECT_NO_THROW(warm_synthesize(family, t.alphas.back() + 0.5 * spacing, t, structure, cfg));
  EXPECT_THROW(warm_synthesize(family, t.alphas.back() + 1.5 * spacing, t, structure, cfg), RangeError);
  EXPECT_THROW(warm_synthesize(family, -1.5 * spacing, t, structure, cfg), RangeError);

  const Circuit other = build_initial_structure(2, CouplingGraph::complete(2), 1);
  EXPECT_THROW(warm_synthesize(family, 1.0, t, other, cfg), TableMismatchError);
}

TEST_F(ZZFixture, close_neighbours_need_few_iterations) {
  const SweepTable t = build_sweep_table(family, structure, {1.0, 1.0 + 1e-9, 2.0}, cfg);
  const SweepResult r = warm_synthesize(family, 1.0 + 5e-10, t, structure, cfg);
  EXPECT_LE(r.iterations, 2);
}

TEST_F(ZZFixture, warm_start_beats_cold_start) {
  const SweepTable t = build_sweep_table(family, structure, uniform_grid(64), cfg);
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> alpha(t.alphas.front(), t.alphas.back());
  std::vector<int> warm, cold;
  for (int i = 0; i < 25; ++i) {
    const double a = alpha(rng);
    warm.push_back(warm_synthesize(family, a, t, structure, cfg).iterations);
    SynthesisConfig c = cfg;
    c.seed = static_cast<std::uint64_t>(i);
    cold.push_back(cold_synthesize(family, a, structure, c).iterations);
  }
  std::sort(warm.begin(), warm.end());
  std::sort(cold.begin(), cold.end());
  EXPECT_LE(5 * warm[12], cold[12]);
}

TEST(interpolate, self_and_seam) {
  Circuit s(1);
  s.add(GateKind::Ry, {0});
  s.add(GateKind::Rz, {0});
  SweepTable t;
  t.n_qubits = 1;
  t.structure_digest = structure_digest(s);
  t.eps = 1e-8;
  t.alphas = {0.0, 1.0};
  t.rows = {{0.7, 3.1}, {0.7, -3.1}};
  const ParamVector same = interpolate_params(t, s, 0.25);
  EXPECT_EQ(same[0], 0.7);
  // 3.1 and -3.1 are 0.083 apart across the seam
  EXPECT_NEAR(interpolate_params(t, s, 0.5)[1], 3.1 + 0.5 * (2 * pi - 6.2), 1e-12);
}

TEST_F(ZZFixture, file_round_trip) {
  SweepTable t = build_sweep_table(family, structure, uniform_grid(8), cfg);
  t.family = "ZZ";
  const auto path = std::filesystem::temp_directory_path() / "crysynth_table_test.txt";
  save_table(path.string(), t);
  const SweepTable back = load_table(path.string(), true);
  EXPECT_EQ(back.alphas, t.alphas);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(back.eps, t.eps);
  EXPECT_EQ(back.structure_digest, t.structure_digest);
  EXPECT_EQ(structure_digest(table_structure(back)), t.structure_digest);

  std::stringstream text;
  write_table(text, t);
  const std::string full = text.str();
  std::istringstream truncated(full.substr(0, full.size() - full.size() / 4));
  EXPECT_THROW(read_table(truncated), TableFormatError);

  std::string no_digest = full;
  no_digest.replace(no_digest.find("digest"), 6, "dagest");
  std::istringstream bad(no_digest);
  EXPECT_THROW(read_table(bad), TableFormatError);

  SweepTable tampered = t;
  tampered.rows[3][0] += 0.5;
  save_table(path.string(), tampered);
  EXPECT_THROW(load_table(path.string(), true), TableFormatError);
  const SweepTable lazy = load_table(path.string());
  EXPECT_THROW(warm_synthesize(family, 0.5 * (lazy.alphas[3] + lazy.alphas[4]), lazy, structure, cfg),
               TableFormatError);
  std::filesystem::remove(path);
}
