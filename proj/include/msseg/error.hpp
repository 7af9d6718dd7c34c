#ifndef MSSEG_ERROR_HPP
#define MSSEG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace msseg {

enum class ErrorKind {
  Format,
  Topology,
  Degenerate,
  Dimension,
  Parameter,
  Precondition,
  Numeric,
  Feature,
  Initialization,
  Io,
};

const char* to_string(ErrorKind kind);

/// Base class for every error raised by the library. The kind is stable and
/// used by the command line tool for its machine-readable error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure; carries the 1-based line number of the offending line.
class FormatError : public Error {
 public:
  FormatError(int line, const std::string& message)
      : Error(ErrorKind::Format, "line " + std::to_string(line) + ": " + message), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

class TopologyError : public Error {
 public:
  explicit TopologyError(const std::string& message) : Error(ErrorKind::Topology, message) {}
};

class DegenerateError : public Error {
 public:
  DegenerateError(int face, const std::string& message)
      : Error(ErrorKind::Degenerate, "face " + std::to_string(face) + ": " + message),
        face_(face) {}

  int face() const { return face_; }

 private:
  int face_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& message) : Error(ErrorKind::Dimension, message) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& message) : Error(ErrorKind::Parameter, message) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& message)
      : Error(ErrorKind::Precondition, message) {}
};

class NumericError : public Error {
 public:
  NumericError(const std::string& message, double residual)
      : Error(ErrorKind::Numeric, message + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

class FeatureError : public Error {
 public:
  explicit FeatureError(const std::string& message) : Error(ErrorKind::Feature, message) {}
};

class InitializationError : public Error {
 public:
  explicit InitializationError(const std::string& message)
      : Error(ErrorKind::Initialization, message) {}
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& message)
      : Error(ErrorKind::Io, path + ": " + message) {}
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Format: return "format";
    case ErrorKind::Topology: return "topology";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Feature: return "feature";
    case ErrorKind::Initialization: return "initialization";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace msseg

#endif  // MSSEG_ERROR_HPP
