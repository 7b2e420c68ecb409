#include "crysynth/linalg.hpp"

#include "crysynth/errors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

namespace crysynth {

LocalMatrix LocalMatrix::adjoint() const {
  LocalMatrix r;
  r.dim = dim;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) r(i, j) = std::conj((*this)(j, i));
  return r;
}

Matrix LocalMatrix::to_matrix() const {
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = (*this)(i, j);
  return m;
}

LocalMatrix LocalMatrix::from_matrix(const Matrix& m) {
  if (m.rows() != m.cols() || (m.rows() != 2 && m.rows() != 4))
    throw ArgumentError("local gate matrix must be 2x2 or 4x4");
  LocalMatrix r;
  r.dim = static_cast<int>(m.rows());
  for (int i = 0; i < r.dim; ++i)
    for (int j = 0; j < r.dim; ++j) r(i, j) = m(i, j);
  return r;
}

LocalMatrix LocalMatrix::identity(int dim) {
  LocalMatrix r;
  r.dim = dim;
  for (int i = 0; i < dim; ++i) r(i, i) = 1.0;
  return r;
}

LocalMatrix operator*(const LocalMatrix& x, const LocalMatrix& y) {
  if (x.dim != y.dim) throw ArgumentError("local matrix dimension mismatch");
  LocalMatrix r;
  r.dim = x.dim;
  for (int i = 0; i < x.dim; ++i)
    for (int j = 0; j < x.dim; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < x.dim; ++k) s += x(i, k) * y(k, j);
      r(i, j) = s;
    }
  return r;
}

bool is_power_of_two(Eigen::Index v) { return v > 0 && (v & (v - 1)) == 0; }

int qubits_for_dim(Eigen::Index dim) {
  if (!is_power_of_two(dim) || dim < 2 || dim > kMaxDim)
    throw RangeError("operator dimension must be a power of two in [2, 64], got " +
                     std::to_string(dim));
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return n;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  const Eigen::Index da = a.rows(), db = b.rows();
  if (a.cols() != da || b.cols() != db) throw ArgumentError("kron expects square matrices");
  if (da * db > kMaxDim) throw RangeError("kron result exceeds 64x64");
  Matrix r(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j) r.block(i * db, j * db, db, db) = a(i, j) * b;
  return r;
}

namespace {

struct Layout {
  int n;
  int k;
  int mask = 0;
  std::array<int, kMaxDim> offsets{};  // local index -> global bit pattern
};

Layout make_layout(std::span<const int> qubits, int n, Eigen::Index gdim) {
  if (n < 1 || n > kMaxQubits) throw RangeError("qubit count must lie in [1, 6]");
  const int k = static_cast<int>(qubits.size());
  if (k < 1 || k > n) throw ArgumentError("gate must act on between 1 and n qubits");
  if (gdim != (Eigen::Index{1} << k))
    throw ArgumentError("gate dimension does not match its qubit list");
  Layout l{n, k};
  for (int q : qubits) {
    if (q < 0 || q >= n) throw ArgumentError("qubit index " + std::to_string(q) + " out of range");
    if (l.mask & (1 << q)) throw ArgumentError("duplicate qubit index " + std::to_string(q));
    l.mask |= 1 << q;
  }
  for (int a = 0; a < (1 << k); ++a) {
    int off = 0;
    for (int pos = 0; pos < k; ++pos)
      if (a & (1 << (k - 1 - pos))) off |= 1 << qubits[static_cast<std::size_t>(pos)];
    l.offsets[static_cast<std::size_t>(a)] = off;
  }
  return l;
}

// Element accessor abstracts over LocalMatrix and Matrix.
template <int G, typename Gate>
void apply_impl(Matrix& m, const Gate& g, const Layout& l, Side side) {
  const int d = static_cast<int>(m.rows());
  const int gd = 1 << l.k;
  std::array<cplx, kMaxDim> in{};
  std::array<cplx, kMaxDim> out{};
  cplx* data = m.data();  // column-major: (i, j) at i + j*d
  const auto dim = [&] { if constexpr (G > 0) return G; else return gd; }();
  for (int base = 0; base < d; ++base) {
    if (base & l.mask) continue;
    if (side == Side::Left) {
      for (int col = 0; col < d; ++col) {
        cplx* c = data + static_cast<std::ptrdiff_t>(col) * d + base;
        for (int a = 0; a < dim; ++a) in[a] = c[l.offsets[a]];
        for (int a = 0; a < dim; ++a) {
          cplx s = 0.0;
          for (int b = 0; b < dim; ++b) s += g(a, b) * in[b];
          out[a] = s;
        }
        for (int a = 0; a < dim; ++a) c[l.offsets[a]] = out[a];
      }
    } else {
      for (int row = 0; row < d; ++row) {
        cplx* r = data + row;
        for (int a = 0; a < dim; ++a) in[a] = r[static_cast<std::ptrdiff_t>(base + l.offsets[a]) * d];
        for (int b = 0; b < dim; ++b) {
          cplx s = 0.0;
          for (int a = 0; a < dim; ++a) s += in[a] * g(a, b);
          out[b] = s;
        }
        for (int b = 0; b < dim; ++b) r[static_cast<std::ptrdiff_t>(base + l.offsets[b]) * d] = out[b];
      }
    }
  }
}

void check_target(const Matrix& m, int n) {
  if (m.rows() != m.cols() || m.rows() != (Eigen::Index{1} << n))
    throw ArgumentError("matrix dimension does not match the qubit count");
}

}  // namespace

Matrix embed_gate(const Matrix& g, std::span<const int> qubits, int n) {
  if (g.rows() != g.cols()) throw ArgumentError("gate matrix must be square");
  const Layout l = make_layout(qubits, n, g.rows());
  const int d = 1 << n;
  const int gd = 1 << l.k;
  Matrix r = Matrix::Zero(d, d);
  for (int base = 0; base < d; ++base) {
    if (base & l.mask) continue;
    for (int a = 0; a < gd; ++a)
      for (int b = 0; b < gd; ++b) r(base + l.offsets[a], base + l.offsets[b]) = g(a, b);
  }
  return r;
}

void apply_gate_inplace(Matrix& m, const Matrix& g, std::span<const int> qubits, Side side) {
  if (g.rows() != g.cols()) throw ArgumentError("gate matrix must be square");
  const int n = qubits_for_dim(m.rows());
  check_target(m, n);
  const Layout l = make_layout(qubits, n, g.rows());
  apply_impl<0>(m, g, l, side);
}

void apply_gate_inplace(Matrix& m, const LocalMatrix& g, std::span<const int> qubits, Side side) {
  const int n = qubits_for_dim(m.rows());
  check_target(m, n);
  const Layout l = make_layout(qubits, n, g.dim);
  if (g.dim == 2)
    apply_impl<2>(m, g, l, side);
  else
    apply_impl<4>(m, g, l, side);
}

Matrix random_unitary(int dim, std::uint64_t seed) {
  qubits_for_dim(dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = cplx(re, im) / std::sqrt(2.0);
    }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const cplx rjj = r(j, j);
    const double mag = std::abs(rjj);
    q.col(j) *= mag > 0.0 ? rjj / mag : cplx(1.0);
  }
  return q;
}

double unitarity_residual(const Matrix& m) {
  const Matrix p = m.adjoint() * m - Matrix::Identity(m.rows(), m.cols());
  return p.cwiseAbs().maxCoeff();
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

Matrix read_unitary(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError(lineno + 1, "missing qubit count");
  int n = 0;
  {
    std::istringstream ls(line);
    std::string extra;
    if (!(ls >> n) || (ls >> extra)) throw ParseError(lineno, "expected a single integer qubit count");
  }
  if (n < 1 || n > kMaxQubits) throw ParseError(lineno, "qubit count must lie in [1, 6]");
  const int d = 1 << n;
  Matrix m(d, d);
  for (int row = 0; row < d; ++row) {
    if (!next_line()) throw ParseError(lineno + 1, "expected " + std::to_string(d) + " matrix rows");
    std::istringstream ls(line);
    for (int col = 0; col < d; ++col) {
      double re = 0.0, im = 0.0;
      if (!(ls >> re >> im))
        throw ParseError(lineno, "expected " + std::to_string(2 * d) + " numbers in row");
      if (!std::isfinite(re) || !std::isfinite(im)) throw ParseError(lineno, "non-finite entry");
      m(row, col) = cplx(re, im);
    }
    std::string extra;
    if (ls >> extra) throw ParseError(lineno, "too many numbers in row");
  }
  if (next_line()) throw ParseError(lineno, "trailing content after matrix");
  const double res = unitarity_residual(m);
  if (res > 1e-10)
    throw ArgumentError("matrix is not unitary (max |U^dagger U - I| = " + std::to_string(res) + ")");
  return m;
}

void write_unitary(std::ostream& out, const Matrix& m) {
  const int n = qubits_for_dim(m.rows());
  out << n << '\n';
  std::ostringstream os;
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << m(i, j).real() << ' ' << m(i, j).imag();
    }
    os << '\n';
  }
  out << os.str();
}

Matrix load_unitary(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ArgumentError("cannot open unitary file '" + path + "'");
  return read_unitary(f);
}

void save_unitary(const std::string& path, const Matrix& m) {
  std::ofstream f(path);
  if (!f) throw ArgumentError("cannot write unitary file '" + path + "'");
  write_unitary(f, m);
}

}  // namespace crysynth
