#include "crysynth/errors.hpp"
#include "crysynth/gates.hpp"

#include "gtest/gtest.h"
#include "test_util.hpp"

#include <numbers>
#include <random>

using namespace crysynth;
using std::numbers::pi;

namespace {

Matrix expansion_product(const std::vector<BoundGate>& gates) {
  Matrix v = Matrix::Identity(4, 4);
  for (const auto& g : gates) v = embed_gate(gate_matrix(g.kind, g.params), g.qubits, 2) * v;
  return v;
}

Matrix cry(double t) { return gate_matrix(GateKind::CRY, std::vector<double>{t}); }

// CRY with control on qubit 0, target on qubit 1, in the 2-qubit register frame
Matrix cry01(double t) { return embed_gate(cry(t), std::vector<int>{0, 1}, 2); }

}  // namespace

TEST(gates, matrix_examples) {
  EXPECT_LT(max_abs_diff(cry(0), Matrix::Identity(4, 4)), 1e-15);
  Matrix zi = Matrix::Zero(4, 4);
  zi.diagonal() << 1, 1, -1, -1;
  EXPECT_LT(max_abs_diff(cry(2 * pi), zi), 1e-15);
  EXPECT_LT(max_abs_diff(gate_matrix(GateKind::U3, std::vector<double>{pi, 0, pi}), gate_matrix(GateKind::X, {})),
            1e-15);
}

TEST(gates, arity_errors) {
  EXPECT_THROW(gate_matrix(GateKind::U3, std::vector<double>{1.0}), ArgumentError);
  EXPECT_THROW(gate_matrix(GateKind::H, std::vector<double>{1.0}), ArgumentError);
  EXPECT_THROW(gate_derivative(GateKind::CNOT, {}, 0), ArgumentError);
}

TEST(gates, derivative_examples) {
  Matrix half_ry_pi(2, 2);
  half_ry_pi << 0, -0.5, 0.5, 0;
  EXPECT_LT(max_abs_diff(gate_derivative(GateKind::Ry, std::vector<double>{0.0}, 0), half_ry_pi), 1e-15);
  const Matrix dc = gate_derivative(GateKind::CRY, std::vector<double>{0.0}, 0);
  EXPECT_LT(dc.block(0, 0, 2, 2).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(dc.block(0, 2, 2, 2).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(gates, derivatives_match_finite_differences) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> angle(-2 * pi, 2 * pi);
  const double h = 1e-6;
  for (GateKind k : {GateKind::U3, GateKind::Ry, GateKind::Rz, GateKind::P, GateKind::CRY}) {
    for (int t = 0; t < 100; ++t) {
      std::vector<double> p(static_cast<std::size_t>(param_count(k)));
      for (double& v : p) v = angle(rng);
      for (int i = 0; i < param_count(k); ++i) {
        auto plus = p, minus = p;
        plus[static_cast<std::size_t>(i)] += h;
        minus[static_cast<std::size_t>(i)] -= h;
        const Matrix fd = (gate_matrix(k, plus) - gate_matrix(k, minus)) / (2 * h);
        EXPECT_LT(max_abs_diff(gate_derivative(k, p, i), fd), 1e-8) << gate_name(k);
      }
    }
  }
}

TEST(gates, constant_gates_unitary) {
  for (GateKind k : {GateKind::H, GateKind::X, GateKind::Z, GateKind::S, GateKind::Sdg, GateKind::CNOT, GateKind::CZ})
    EXPECT_LT(unitarity_residual(gate_matrix(k, {})), 1e-15) << gate_name(k);
}

TEST(gates, classify_examples) {
  EXPECT_EQ(classify_cry(0, 1e-4), CryClass::Trivial);
  EXPECT_EQ(classify_cry(2 * pi, 1e-4), CryClass::ControlZ);
  EXPECT_EQ(classify_cry(pi + 5e-5, 1e-4), CryClass::SingleCnot);
  EXPECT_EQ(classify_cry(3 * pi - 5e-5, 1e-4), CryClass::SingleCnot);
  EXPECT_EQ(classify_cry(4 * pi, 1e-4), CryClass::Trivial);
  EXPECT_EQ(classify_cry(1.3, 1e-4), CryClass::Generic);
}

TEST(gates, classify_total) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> angle(-10, 10);
  for (int t = 0; t < 2000; ++t) {
    const double th = angle(rng);
    const double tol = 0.1 * (t % 10 + 1) / 10.0;
    const bool generic = std::abs(std::sin(th / 2)) >= tol && std::abs(std::cos(th / 2)) >= tol;
    EXPECT_EQ(classify_cry(th, tol) == CryClass::Generic, generic);
  }
}

TEST(gates, expand_examples) {
  EXPECT_TRUE(expand_cry(0, 0, 1, CryClass::Trivial).empty());
  const auto generic = expand_cry(1.3, 0, 1, CryClass::Generic);
  ASSERT_EQ(generic.size(), 4u);
  EXPECT_LT(max_abs_diff(expansion_product(generic), cry01(1.3)), 1e-12);

  Matrix cry_pi = Matrix::Zero(4, 4);
  cry_pi(0, 0) = cry_pi(2, 2) = 1.0;
  cry_pi(1, 3) = -1.0;
  cry_pi(3, 1) = 1.0;
  EXPECT_LT(max_abs_diff(expansion_product(expand_cry(pi, 0, 1, CryClass::SingleCnot)), cry_pi), 1e-12);
  EXPECT_LT(max_abs_diff(expansion_product(expand_cry(3 * pi, 0, 1, CryClass::SingleCnot)), cry01(3 * pi)), 1e-12);
  EXPECT_LT(max_abs_diff(expansion_product(expand_cry(2 * pi, 0, 1, CryClass::ControlZ)), cry01(2 * pi)), 1e-12);
  // reversed orientation: control on the low local factor of the 2-qubit frame
  EXPECT_LT(max_abs_diff(expansion_product(expand_cry(0.7, 1, 0, CryClass::Generic)),
                         embed_gate(cry(0.7), std::vector<int>{1, 0}, 2)),
            1e-12);
}

TEST(gates, expand_inconsistent_class) {
  EXPECT_THROW(expand_cry(1.3, 0, 1, CryClass::SingleCnot), InternalError);
  EXPECT_THROW(expand_cry(pi, 0, 1, CryClass::Generic), InternalError);
}

TEST(gates, expansion_exact_for_random_angles) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> angle(0, 4 * pi);
  for (int t = 0; t < 1000; ++t) {
    const double th = angle(rng);
    const CryClass k = classify_cry(th, 1e-4);
    const Matrix expected = cry01(snap_cry_angle(th, k));
    EXPECT_LT(max_abs_diff(expansion_product(expand_cry(th, 0, 1, k)), expected), 1e-12);
  }
}
