#pragma once

// Dense complex kernels for operators on n <= 6 qubits.
//
// Bit convention used throughout the library: qubit 0 is the least
// significant bit of a computational-basis index. For a multi-qubit gate the
// first listed qubit is the most significant factor of the gate's local
// ordering, so a two-qubit gate listed as (control, target) acts on local
// index 2*b_control + b_target.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

namespace crysynth {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr int kMaxDim = 64;
inline constexpr int kMaxQubits = 6;

/// Operator on one or two qubits, row-major, no heap storage.
struct LocalMatrix {
  int dim = 2;
  std::array<cplx, 16> a{};

  cplx& operator()(int r, int c) { return a[static_cast<std::size_t>(r * dim + c)]; }
  const cplx& operator()(int r, int c) const { return a[static_cast<std::size_t>(r * dim + c)]; }

  LocalMatrix adjoint() const;
  Matrix to_matrix() const;
  static LocalMatrix from_matrix(const Matrix& m);
  static LocalMatrix identity(int dim);
};

LocalMatrix operator*(const LocalMatrix& x, const LocalMatrix& y);

enum class Side { Left, Right };

bool is_power_of_two(Eigen::Index v);

/// log2 of a valid operator dimension; RangeError unless 2 <= dim <= 64.
int qubits_for_dim(Eigen::Index dim);

/// Kronecker product; RangeError when the result would exceed 64x64.
Matrix kron(const Matrix& a, const Matrix& b);

/// The n-qubit operator acting as g on `qubits` and as identity elsewhere.
Matrix embed_gate(const Matrix& g, std::span<const int> qubits, int n);

/// Replaces m by embed(g)*m (Left) or m*embed(g) (Right) with strided updates.
void apply_gate_inplace(Matrix& m, const Matrix& g, std::span<const int> qubits, Side side);
void apply_gate_inplace(Matrix& m, const LocalMatrix& g, std::span<const int> qubits, Side side);

/// Haar-random unitary from the QR factorisation of a complex Ginibre matrix.
Matrix random_unitary(int dim, std::uint64_t seed);

/// max |(m^dagger m - I)_ij|
double unitarity_residual(const Matrix& m);

/// max |a_ij - b_ij|
double max_abs_diff(const Matrix& a, const Matrix& b);

// Unitary text format: first line n, then 2^n rows of 2*2^n floats
// (re im re im ...), row-major.
Matrix read_unitary(std::istream& in);
void write_unitary(std::ostream& out, const Matrix& m);
Matrix load_unitary(const std::string& path);
void save_unitary(const std::string& path, const Matrix& m);

}  // namespace crysynth
