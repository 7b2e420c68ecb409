#include "crysynth/qasm.hpp"

#include "crysynth/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace crysynth {

using std::numbers::pi;

namespace {

std::string fmt_angle(double v) {
  if (!std::isfinite(v)) throw ExportError("non-finite angle cannot be exported");
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string qref(int q) { return "q[" + std::to_string(q) + "]"; }

}  // namespace

std::string to_qasm(const Circuit& c, std::span<const double> params, const QasmOptions& opts) {
  if (static_cast<int>(params.size()) != c.n_params()) throw ArgumentError("parameter length mismatch");
  std::ostringstream os;
  os << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  if (c.global_phase() != 0.0) os << "// global_phase: " << fmt_angle(c.global_phase()) << '\n';
  os << "qreg q[" << c.n_qubits() << "];\n";
  for (const Gate& g : c.gates()) {
    const auto v = gate_params(g, params);
    const std::string a = qref(g.qubits[0]);
    const std::string b = g.arity() == 2 ? qref(g.qubits[1]) : std::string();
    switch (g.kind) {
      case GateKind::U3:
        os << "u3(" << fmt_angle(v[0]) << ',' << fmt_angle(v[1]) << ',' << fmt_angle(v[2]) << ") " << a << ";\n";
        break;
      case GateKind::Ry:
        os << "ry(" << fmt_angle(v[0]) << ") " << a << ";\n";
        break;
      case GateKind::Rz:
        os << "rz(" << fmt_angle(v[0]) << ") " << a << ";\n";
        break;
      case GateKind::P:
        os << "u1(" << fmt_angle(v[0]) << ") " << a << ";\n";
        break;
      case GateKind::H:
      case GateKind::X:
      case GateKind::Z:
      case GateKind::S:
      case GateKind::Sdg:
        os << gate_name(g.kind) << ' ' << a << ";\n";
        break;
      case GateKind::CNOT:
        os << "cx " << a << ',' << b << ";\n";
        break;
      case GateKind::CZ:
        os << "cz " << a << ',' << b << ";\n";
        break;
      case GateKind::CRY:
        if (opts.expand_cry) {
          os << "ry(" << fmt_angle(v[0] / 2) << ") " << b << ";\n";
          os << "cx " << a << ',' << b << ";\n";
          os << "ry(" << fmt_angle(-v[0] / 2) << ") " << b << ";\n";
          os << "cx " << a << ',' << b << ";\n";
        } else {
          os << "cry(" << fmt_angle(v[0]) << ") " << a << ',' << b << ";\n";
        }
        break;
    }
  }
  return os.str();
}

namespace {

enum class Tok { Ident, Number, String, Symbol, End };

struct Token {
  Tok type;
  std::string text;
  int line;
};

struct Lexed {
  std::vector<Token> tokens;
  double global_phase = 0.0;
};

Lexed lex(std::string_view src) {
  Lexed out;
  int line = 1;
  std::size_t i = 0;
  const std::string_view phase_tag = "global_phase:";
  while (i < src.size()) {
    const char ch = src[i];
    if (ch == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
    } else if (ch == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      std::size_t end = src.find('\n', i);
      if (end == std::string_view::npos) end = src.size();
      std::string_view comment = src.substr(i + 2, end - i - 2);
      const auto first = comment.find_first_not_of(' ');
      if (first != std::string_view::npos && comment.substr(first).starts_with(phase_tag)) {
        const std::string value(comment.substr(first + phase_tag.size()));
        char* endp = nullptr;
        const double v = std::strtod(value.c_str(), &endp);
        if (endp == value.c_str()) throw ParseError(line, "malformed global_phase comment");
        out.global_phase = v;
      }
      i = end;
    } else if (ch == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      const std::size_t end = src.find("*/", i + 2);
      if (end == std::string_view::npos) throw ParseError(line, "unterminated block comment");
      for (std::size_t k = i; k < end; ++k)
        if (src[k] == '\n') ++line;
      i = end + 2;
    } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.tokens.push_back({Tok::Ident, std::string(src.substr(i, j - i)), line});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      out.tokens.push_back({Tok::Number, std::string(src.substr(i, j - i)), line});
      i = j;
    } else if (ch == '"') {
      const std::size_t end = src.find('"', i + 1);
      if (end == std::string_view::npos) throw ParseError(line, "unterminated string");
      out.tokens.push_back({Tok::String, std::string(src.substr(i + 1, end - i - 1)), line});
      i = end + 1;
    } else if (std::string_view("()[],;+-*/^{}=><").find(ch) != std::string_view::npos) {
      std::string sym(1, ch);
      if ((ch == '-' && i + 1 < src.size() && src[i + 1] == '>') ||
          (ch == '=' && i + 1 < src.size() && src[i + 1] == '=')) {
        sym += src[i + 1];
        ++i;
      }
      out.tokens.push_back({Tok::Symbol, sym, line});
      ++i;
    } else {
      throw ParseError(line, std::string("unexpected character '") + ch + "'");
    }
  }
  out.tokens.push_back({Tok::End, "", line});
  return out;
}

class Parser {
 public:
  explicit Parser(Lexed lexed) : toks_(std::move(lexed.tokens)), phase_(lexed.global_phase) {}

  CircuitParams parse() {
    bool header_seen = false;
    while (peek().type != Tok::End) {
      const Token& t = peek();
      if (t.type != Tok::Ident) throw ParseError(t.line, "expected a statement, got '" + t.text + "'");
      if (t.text == "OPENQASM") {
        next();
        const Token v = next();
        if (v.type != Tok::Number) throw ParseError(v.line, "expected version number");
        if (v.text != "2.0" && v.text != "2") throw UnsupportedError(v.line, "OPENQASM " + v.text);
        if (header_seen || circuit_) throw ParseError(v.line, "misplaced OPENQASM header");
        header_seen = true;
        expect(";");
      } else if (t.text == "include") {
        next();
        const Token f = next();
        if (f.type != Tok::String) throw ParseError(f.line, "expected include file name");
        if (f.text != "qelib1.inc") throw UnsupportedError(f.line, "include \"" + f.text + "\"");
        expect(";");
      } else if (t.text == "qreg") {
        parse_qreg();
      } else if (t.text == "creg" || t.text == "measure" || t.text == "barrier" || t.text == "reset" ||
                 t.text == "if" || t.text == "gate" || t.text == "opaque") {
        throw UnsupportedError(t.line, t.text);
      } else {
        parse_gate();
      }
    }
    if (!circuit_) throw ParseError(peek().line, "no qreg declared");
    circuit_->set_global_phase(phase_);
    return {std::move(*circuit_), std::move(params_)};
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token next() {
    Token t = toks_[pos_];
    if (t.type != Tok::End) ++pos_;
    return t;
  }
  bool accept(std::string_view sym) {
    if (peek().type == Tok::Symbol && peek().text == sym) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(std::string_view sym) {
    const Token& t = peek();
    if (!accept(sym))
      throw ParseError(t.line, "expected '" + std::string(sym) + "', got '" + t.text + "'");
  }
  int integer() {
    const Token t = next();
    if (t.type != Tok::Number || t.text.find_first_not_of("0123456789") != std::string::npos)
      throw ParseError(t.line, "expected an integer, got '" + t.text + "'");
    return std::stoi(t.text);
  }

  void parse_qreg() {
    const int line = next().line;
    const Token name = next();
    if (name.type != Tok::Ident) throw ParseError(name.line, "expected register name");
    expect("[");
    const int n = integer();
    expect("]");
    expect(";");
    if (circuit_) throw UnsupportedError(line, "second qreg");
    if (n < 1 || n > kMaxQubits) throw UnsupportedError(line, "qreg of size " + std::to_string(n));
    reg_ = name.text;
    circuit_.emplace(n);
  }

  // expr := term (('+'|'-') term)*
  double expr() {
    double v = term();
    for (;;) {
      if (accept("+"))
        v += term();
      else if (accept("-"))
        v -= term();
      else
        return v;
    }
  }
  double term() {
    double v = unary();
    for (;;) {
      if (accept("*")) {
        v *= unary();
      } else if (accept("/")) {
        const int line = peek().line;
        const double d = unary();
        if (d == 0.0) throw ParseError(line, "division by zero in angle expression");
        v /= d;
      } else {
        return v;
      }
    }
  }
  double unary() {
    if (accept("-")) return -unary();
    if (accept("+")) return unary();
    return primary();
  }
  double primary() {
    const Token t = next();
    if (t.type == Tok::Number) {
      char* end = nullptr;
      const double v = std::strtod(t.text.c_str(), &end);
      if (end != t.text.c_str() + t.text.size()) throw ParseError(t.line, "malformed number '" + t.text + "'");
      return v;
    }
    if (t.type == Tok::Ident) {
      if (t.text == "pi") return pi;
      throw UnsupportedError(t.line, "expression term '" + t.text + "'");
    }
    if (t.type == Tok::Symbol && t.text == "(") {
      const double v = expr();
      expect(")");
      return v;
    }
    if (t.type == Tok::Symbol && t.text == "^") throw UnsupportedError(t.line, "operator ^");
    throw ParseError(t.line, "unexpected '" + t.text + "' in angle expression");
  }

  int qubit_arg() {
    const Token name = next();
    if (name.type != Tok::Ident) throw ParseError(name.line, "expected a qubit argument");
    if (name.text != reg_) throw ParseError(name.line, "unknown register '" + name.text + "'");
    if (peek().type != Tok::Symbol || peek().text != "[") throw UnsupportedError(name.line, "register broadcast");
    expect("[");
    const int q = integer();
    expect("]");
    if (q >= circuit_->n_qubits()) throw ParseError(name.line, "qubit index " + std::to_string(q) + " out of range");
    return q;
  }

  struct Mapping {
    GateKind kind;
    int n_args;    // angles accepted in the QASM call
    int n_qubits;
  };

  void parse_gate() {
    static const std::unordered_map<std::string, Mapping> table = {
        {"u3", {GateKind::U3, 3, 1}}, {"u", {GateKind::U3, 3, 1}}, {"U", {GateKind::U3, 3, 1}},   {"u2", {GateKind::U3, 2, 1}},
        {"u1", {GateKind::P, 1, 1}},  {"p", {GateKind::P, 1, 1}},    {"rx", {GateKind::U3, 1, 1}},
        {"ry", {GateKind::Ry, 1, 1}}, {"rz", {GateKind::Rz, 1, 1}},  {"h", {GateKind::H, 0, 1}},
        {"x", {GateKind::X, 0, 1}},   {"y", {GateKind::U3, 0, 1}},   {"z", {GateKind::Z, 0, 1}},
        {"s", {GateKind::S, 0, 1}},   {"sdg", {GateKind::Sdg, 0, 1}}, {"t", {GateKind::P, 0, 1}},
        {"tdg", {GateKind::P, 0, 1}}, {"cx", {GateKind::CNOT, 0, 2}}, {"CX", {GateKind::CNOT, 0, 2}},
        {"cz", {GateKind::CZ, 0, 2}}, {"cry", {GateKind::CRY, 1, 2}},
    };
    const Token name = next();
    if (!circuit_) throw ParseError(name.line, "gate before qreg declaration");
    const auto it = table.find(name.text);
    if (it == table.end()) throw UnsupportedError(name.line, "gate " + name.text);
    const Mapping& m = it->second;

    std::vector<double> args;
    if (accept("(")) {
      if (!accept(")")) {
        args.push_back(expr());
        while (accept(",")) args.push_back(expr());
        expect(")");
      }
    }
    if (static_cast<int>(args.size()) != m.n_args)
      throw ParseError(name.line, "gate " + name.text + " expects " + std::to_string(m.n_args) + " angles");
    std::vector<int> qs{qubit_arg()};
    while (accept(",")) qs.push_back(qubit_arg());
    expect(";");
    if (static_cast<int>(qs.size()) != m.n_qubits)
      throw ParseError(name.line, "gate " + name.text + " expects " + std::to_string(m.n_qubits) + " qubits");
    if (qs.size() == 2 && qs[0] == qs[1]) throw ParseError(name.line, "repeated qubit argument");
    for (double a : args)
      if (!std::isfinite(a)) throw ParseError(name.line, "non-finite angle");

    std::vector<double> values;
    const std::string& n = name.text;
    if (n == "u2")
      values = {pi / 2, args[0], args[1]};
    else if (n == "rx")
      values = {args[0], -pi / 2, pi / 2};
    else if (n == "y")
      values = {pi, pi / 2, pi / 2};
    else if (n == "t")
      values = {pi / 4};
    else if (n == "tdg")
      values = {-pi / 4};
    else
      values = args;
    circuit_->add(m.kind, qs);
    params_.insert(params_.end(), values.begin(), values.end());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  double phase_;
  std::string reg_;
  std::optional<Circuit> circuit_;
  ParamVector params_;
};

}  // namespace

CircuitParams from_qasm(std::string_view text) { return Parser(lex(text)).parse(); }

CircuitParams load_qasm(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ArgumentError("cannot open QASM file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return from_qasm(ss.str());
}

void save_qasm(const std::string& path, const Circuit& c, std::span<const double> params,
               const QasmOptions& opts) {
  std::ofstream f(path);
  if (!f) throw ArgumentError("cannot write QASM file '" + path + "'");
  f << to_qasm(c, params, opts);
}

}  // namespace crysynth
