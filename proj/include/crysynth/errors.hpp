#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crysynth {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

class ExportError : public Error {
 public:
  using Error::Error;
};

/// QASM syntax error; `line` is 1-based.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A well-formed construct outside the supported subset.
class UnsupportedError : public Error {
 public:
  UnsupportedError(int line, std::string construct)
      : Error("line " + std::to_string(line) + ": unsupported construct '" + construct + "'"),
        line_(line),
        construct_(std::move(construct)) {}
  int line() const noexcept { return line_; }
  const std::string& construct() const noexcept { return construct_; }

 private:
  int line_;
  std::string construct_;
};

/// Non-finite cost or gradient; carries the offending point.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::vector<double> point)
      : Error(what), point_(std::move(point)) {}
  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

class InitFailedError : public Error {
 public:
  InitFailedError(const std::string& what, double best_cost)
      : Error(what), best_cost_(best_cost) {}
  double best_cost() const noexcept { return best_cost_; }

 private:
  double best_cost_;
};

class FinalizeError : public Error {
 public:
  FinalizeError(const std::string& what, double best_cost)
      : Error(what), best_cost_(best_cost) {}
  double best_cost() const noexcept { return best_cost_; }

 private:
  double best_cost_;
};

class SweepBuildError : public Error {
 public:
  SweepBuildError(double alpha, double cost)
      : Error("sweep row failed at alpha=" + std::to_string(alpha) +
              " (cost " + std::to_string(cost) + ")"),
        alpha_(alpha) {}
  double alpha() const noexcept { return alpha_; }

 private:
  double alpha_;
};

class SweepQueryError : public Error {
 public:
  using Error::Error;
};

class TableMismatchError : public Error {
 public:
  using Error::Error;
};

class TableFormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace crysynth
