#include "crysynth/gates.hpp"

#include "crysynth/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace crysynth {

using std::numbers::pi;

namespace {

constexpr cplx kI{0.0, 1.0};

LocalMatrix one_qubit(cplx a, cplx b, cplx c, cplx d) {
  LocalMatrix m;
  m.dim = 2;
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

// |1><1| (x) block; the control-0 block is `zero_block` times identity.
LocalMatrix controlled(const LocalMatrix& block, cplx zero_block) {
  LocalMatrix m;
  m.dim = 4;
  m(0, 0) = zero_block;
  m(1, 1) = zero_block;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(2 + i, 2 + j) = block(i, j);
  return m;
}

LocalMatrix ry(double t) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  return one_qubit(c, -s, s, c);
}

void check_arity(GateKind kind, std::span<const double> params) {
  if (static_cast<int>(params.size()) != param_count(kind))
    throw ArgumentError("gate " + std::string(gate_name(kind)) + " expects " +
                        std::to_string(param_count(kind)) + " parameters, got " +
                        std::to_string(params.size()));
}

}  // namespace

int param_count(GateKind kind) {
  switch (kind) {
    case GateKind::U3:
      return 3;
    case GateKind::Ry:
    case GateKind::Rz:
    case GateKind::P:
    case GateKind::CRY:
      return 1;
    default:
      return 0;
  }
}

int arity(GateKind kind) {
  switch (kind) {
    case GateKind::CRY:
    case GateKind::CNOT:
    case GateKind::CZ:
      return 2;
    default:
      return 1;
  }
}

std::string_view gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::U3: return "u3";
    case GateKind::Ry: return "ry";
    case GateKind::Rz: return "rz";
    case GateKind::P: return "p";
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::Z: return "z";
    case GateKind::S: return "s";
    case GateKind::Sdg: return "sdg";
    case GateKind::CRY: return "cry";
    case GateKind::CNOT: return "cnot";
    case GateKind::CZ: return "cz";
  }
  return "?";
}

std::optional<GateKind> gate_kind_from_name(std::string_view name) {
  for (GateKind k : {GateKind::U3, GateKind::Ry, GateKind::Rz, GateKind::P, GateKind::H,
                     GateKind::X, GateKind::Z, GateKind::S, GateKind::Sdg, GateKind::CRY,
                     GateKind::CNOT, GateKind::CZ})
    if (gate_name(k) == name) return k;
  return std::nullopt;
}

double angle_period(GateKind kind) { return kind == GateKind::CRY ? 4 * pi : 2 * pi; }

LocalMatrix gate_local(GateKind kind, std::span<const double> params) {
  check_arity(kind, params);
  const double h = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case GateKind::U3: {
      const double t = params[0], p = params[1], l = params[2];
      const double c = std::cos(t / 2), s = std::sin(t / 2);
      return one_qubit(c, -std::exp(kI * l) * s, std::exp(kI * p) * s, std::exp(kI * (p + l)) * c);
    }
    case GateKind::Ry:
      return ry(params[0]);
    case GateKind::Rz:
      return one_qubit(std::exp(-kI * (params[0] / 2)), 0.0, 0.0, std::exp(kI * (params[0] / 2)));
    case GateKind::P:
      return one_qubit(1.0, 0.0, 0.0, std::exp(kI * params[0]));
    case GateKind::H:
      return one_qubit(h, h, h, -h);
    case GateKind::X:
      return one_qubit(0.0, 1.0, 1.0, 0.0);
    case GateKind::Z:
      return one_qubit(1.0, 0.0, 0.0, -1.0);
    case GateKind::S:
      return one_qubit(1.0, 0.0, 0.0, kI);
    case GateKind::Sdg:
      return one_qubit(1.0, 0.0, 0.0, -kI);
    case GateKind::CRY:
      return controlled(ry(params[0]), 1.0);
    case GateKind::CNOT:
      return controlled(one_qubit(0.0, 1.0, 1.0, 0.0), 1.0);
    case GateKind::CZ:
      return controlled(one_qubit(1.0, 0.0, 0.0, -1.0), 1.0);
  }
  throw InternalError("unknown gate kind");
}

LocalMatrix gate_local_derivative(GateKind kind, std::span<const double> params, int idx) {
  if (!is_parametric(kind))
    throw ArgumentError("gate " + std::string(gate_name(kind)) + " has no parameters");
  check_arity(kind, params);
  if (idx < 0 || idx >= param_count(kind)) throw ArgumentError("parameter index out of range");
  switch (kind) {
    case GateKind::U3: {
      const double t = params[0], p = params[1], l = params[2];
      const double c = std::cos(t / 2), s = std::sin(t / 2);
      const cplx el = std::exp(kI * l), ep = std::exp(kI * p), epl = std::exp(kI * (p + l));
      if (idx == 0) return one_qubit(-s / 2.0, -el * c / 2.0, ep * c / 2.0, -epl * s / 2.0);
      if (idx == 1) return one_qubit(0.0, 0.0, kI * ep * s, kI * epl * c);
      return one_qubit(0.0, -kI * el * s, 0.0, kI * epl * c);
    }
    case GateKind::Ry: {
      LocalMatrix m = ry(params[0] + pi);
      for (auto& v : m.a) v *= 0.5;
      return m;
    }
    case GateKind::Rz:
      return one_qubit(-kI / 2.0 * std::exp(-kI * (params[0] / 2)), 0.0, 0.0,
                       kI / 2.0 * std::exp(kI * (params[0] / 2)));
    case GateKind::P:
      return one_qubit(0.0, 0.0, 0.0, kI * std::exp(kI * params[0]));
    case GateKind::CRY: {
      LocalMatrix b = ry(params[0] + pi);
      for (auto& v : b.a) v *= 0.5;
      return controlled(b, 0.0);
    }
    default:
      break;
  }
  throw InternalError("unhandled parametric gate");
}

Matrix gate_matrix(GateKind kind, std::span<const double> params) {
  return gate_local(kind, params).to_matrix();
}

Matrix gate_derivative(GateKind kind, std::span<const double> params, int idx) {
  return gate_local_derivative(kind, params, idx).to_matrix();
}

std::string_view cry_class_name(CryClass klass) {
  switch (klass) {
    case CryClass::Trivial: return "trivial";
    case CryClass::ControlZ: return "control-z";
    case CryClass::SingleCnot: return "single-cnot";
    case CryClass::Generic: return "generic";
  }
  return "?";
}

CryClass classify_cry(double theta, double tol) {
  const double s = std::sin(theta / 2), c = std::cos(theta / 2);
  if (std::abs(s) < tol) return c > 0 ? CryClass::Trivial : CryClass::ControlZ;
  if (std::abs(c) < tol) return CryClass::SingleCnot;
  return CryClass::Generic;
}

namespace {

double wrap_4pi(double theta) {
  double r = std::fmod(theta, 4 * pi);
  if (r < 0) r += 4 * pi;
  return r;
}

}  // namespace

double snap_cry_angle(double theta, CryClass klass) {
  const double w = wrap_4pi(theta);
  switch (klass) {
    case CryClass::Trivial:
      return 0.0;
    case CryClass::ControlZ:
      return 2 * pi;
    case CryClass::SingleCnot:
      // pi and 3*pi are the two inequivalent odd multiples mod 4*pi
      return w < 2 * pi ? pi : 3 * pi;
    case CryClass::Generic:
      return theta;
  }
  return theta;
}

std::vector<BoundGate> expand_cry(double theta, int control, int target, CryClass klass,
                                  double tol) {
  if (classify_cry(theta, tol) != klass)
    throw InternalError("CRY angle " + std::to_string(theta) + " is not of class " +
                        std::string(cry_class_name(klass)));
  if (control == target) throw ArgumentError("CRY control and target coincide");
  switch (klass) {
    case CryClass::Trivial:
      return {};
    case CryClass::ControlZ:
      return {{GateKind::Z, {control}, {}}};
    case CryClass::SingleCnot: {
      // S X S^dagger = Y and Ry(pi) = -iY, Ry(3pi) = iY; the +-i goes on the control.
      const double phase = snap_cry_angle(theta, klass) < 2 * pi ? -pi / 2 : pi / 2;
      return {{GateKind::Sdg, {target}, {}},
              {GateKind::CNOT, {control, target}, {}},
              {GateKind::S, {target}, {}},
              {GateKind::P, {control}, {phase}}};
    }
    case CryClass::Generic:
      return {{GateKind::Ry, {target}, {theta / 2}},
              {GateKind::CNOT, {control, target}, {}},
              {GateKind::Ry, {target}, {-theta / 2}},
              {GateKind::CNOT, {control, target}, {}}};
  }
  throw InternalError("unknown CRY class");
}

}  // namespace crysynth
