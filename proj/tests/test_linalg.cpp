#include "crysynth/errors.hpp"
#include "crysynth/gates.hpp"
#include "crysynth/linalg.hpp"

#include "gtest/gtest.h"
#include "test_util.hpp"

#include <random>
#include <sstream>

using namespace crysynth;

namespace {

const Matrix kX = gate_matrix(GateKind::X, {});
const Matrix kZ = gate_matrix(GateKind::Z, {});
const Matrix kCnot = gate_matrix(GateKind::CNOT, {});

Matrix random_matrix(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = cplx(n(rng), n(rng));
  return m;
}

std::vector<int> random_qubits(int n, int k, std::mt19937_64& rng) {
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(static_cast<std::size_t>(k));
  return all;
}

}  // namespace

TEST(linalg, kron_examples) {
  EXPECT_LT(max_abs_diff(kron(Matrix::Identity(2, 2), Matrix::Identity(2, 2)), Matrix::Identity(4, 4)), 1e-15);
  Matrix zi = Matrix::Zero(4, 4);
  zi.diagonal() << 1, 1, -1, -1;
  EXPECT_LT(max_abs_diff(kron(kZ, Matrix::Identity(2, 2)), zi), 1e-15);
  const Matrix xx = kron(kX, kX);
  EXPECT_LT(max_abs_diff(xx * xx, Matrix::Identity(4, 4)), 1e-15);
}

TEST(linalg, kron_overflow) {
  const Matrix big = Matrix::Identity(32, 32);
  EXPECT_THROW(kron(big, Matrix::Identity(4, 4)), RangeError);
}

TEST(linalg, kron_associative) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = random_matrix(2, rng), b = random_matrix(4, rng), c = random_matrix(2, rng);
    EXPECT_LT(max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))), 1e-13);
  }
}

TEST(linalg, embed_examples) {
  EXPECT_LT(max_abs_diff(embed_gate(kX, std::vector<int>{0}, 2), kron(Matrix::Identity(2, 2), kX)), 1e-15);

  // CNOT listed as (1, 0): control on the high bit
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = expected(1, 1) = 1.0;
  expected(2, 3) = expected(3, 2) = 1.0;
  EXPECT_LT(max_abs_diff(embed_gate(kCnot, std::vector<int>{1, 0}, 2), expected), 1e-15);

  const Matrix z2 = embed_gate(kZ, std::vector<int>{2}, 3);
  Eigen::VectorXcd basis = Eigen::VectorXcd::Zero(8);
  basis(4) = 1.0;  // |100>
  EXPECT_LT((z2 * basis + basis).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(linalg, embed_errors) {
  EXPECT_THROW(embed_gate(kCnot, std::vector<int>{1, 1}, 2), ArgumentError);
  EXPECT_THROW(embed_gate(kX, std::vector<int>{2}, 2), ArgumentError);
  EXPECT_THROW(embed_gate(kX, std::vector<int>{0, 1}, 2), ArgumentError);
}

TEST(linalg, embed_matches_naive_oracle) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const int k = 1 + static_cast<int>(rng() % std::min(n, 2));
    const auto qs = random_qubits(n, k, rng);
    const Matrix g = random_matrix(1 << k, rng);
    EXPECT_LT(max_abs_diff(embed_gate(g, qs, n), oracle::naive_embed(g, qs, n)), 1e-15);
  }
}

TEST(linalg, disjoint_embeddings_commute) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    const auto qs = random_qubits(4, 3, rng);
    const Matrix a = embed_gate(random_unitary(4, rng()), std::vector<int>{qs[0], qs[1]}, 4);
    const Matrix b = embed_gate(random_unitary(2, rng()), std::vector<int>{qs[2]}, 4);
    EXPECT_LT(max_abs_diff(a * b, b * a), 1e-13);
  }
}

TEST(linalg, apply_examples) {
  Matrix m = Matrix::Identity(4, 4);
  apply_gate_inplace(m, kX, std::vector<int>{0}, Side::Left);
  EXPECT_LT(max_abs_diff(m, kron(Matrix::Identity(2, 2), kX)), 1e-15);

  std::mt19937_64 rng(5);
  const Matrix orig = random_matrix(8, rng);
  const Matrix g = random_unitary(4, 99);
  Matrix w = orig;
  apply_gate_inplace(w, g, std::vector<int>{2, 0}, Side::Left);
  apply_gate_inplace(w, Matrix(g.adjoint()), std::vector<int>{2, 0}, Side::Left);
  EXPECT_LT(max_abs_diff(w, orig), 1e-13);
}

TEST(linalg, apply_matches_embed_then_multiply) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const int k = 1 + static_cast<int>(rng() % 2);
    const auto qs = random_qubits(n, k, rng);
    const Matrix g = random_matrix(1 << k, rng);
    const Matrix m = random_matrix(1 << n, rng);
    const Matrix full = oracle::naive_embed(g, qs, n);
    const Side side = (t % 2) ? Side::Left : Side::Right;
    Matrix a = m;
    apply_gate_inplace(a, g, qs, side);
    const Matrix expected = side == Side::Left ? Matrix(full * m) : Matrix(m * full);
    EXPECT_LT(max_abs_diff(a, expected), 1e-13);
    Matrix b = m;
    apply_gate_inplace(b, LocalMatrix::from_matrix(g), qs, side);
    EXPECT_LT(max_abs_diff(b, expected), 1e-13);
  }
}

TEST(linalg, random_unitary_properties) {
  EXPECT_THROW(random_unitary(3, 1), RangeError);
  EXPECT_THROW(random_unitary(128, 1), RangeError);
  const Matrix a = random_unitary(4, 42);
  const Matrix b = random_unitary(4, 42);
  EXPECT_TRUE(a == b);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const int d = 2 << (s % 6);
    EXPECT_LT(unitarity_residual(random_unitary(d, s)), 1e-12);
  }
}

TEST(linalg, haar_second_moment_of_trace) {
  // E|Tr U|^2 = 1 under the Haar measure; Monte-Carlo over 1000 seeds.
  double acc = 0.0;
  for (std::uint64_t s = 0; s < 1000; ++s) acc += std::norm(random_unitary(4, 1000 + s).trace());
  EXPECT_NEAR(acc / 1000.0, 1.0, 0.15);
}

TEST(linalg, unitary_text_format) {
  const Matrix u = random_unitary(8, 9);
  std::stringstream ss;
  write_unitary(ss, u);
  const Matrix back = read_unitary(ss);
  EXPECT_TRUE(back == u);  // 17 significant digits round-trip exactly

  std::istringstream bad("1\n1 0 0 0\n0 0\n");
  try {
    read_unitary(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  std::istringstream nonunitary("1\n1 0 1 0\n0 0 1 0\n");
  EXPECT_THROW(read_unitary(nonunitary), ArgumentError);
}
