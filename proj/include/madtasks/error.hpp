#pragma once

#include <stdexcept>
#include <string>

namespace madtasks {

// Base of every error raised by the library. `code()` is a stable
// machine-readable token (used by the CLI and the HTTP layer).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class RegistryError : public Error {
 public:
  explicit RegistryError(const std::string& what) : Error("unknown_task", what) {}
};

class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what) : Error("contract_violation", what) {}
};

class LoadError : public Error {
 public:
  LoadError(std::size_t line, std::string field, const std::string& what)
      : Error("load_error", "line " + std::to_string(line) + ", field '" + field + "': " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io_error", what) {}
};

class ZeroCellError : public Error {
 public:
  ZeroCellError(char cell, const std::string& context)
      : Error("zero_cell", "cross-tab cell '" + std::string(1, cell) + "' is zero" +
                               (context.empty() ? "" : " (" + context + ")")),
        cell_(cell) {}

  char cell() const noexcept { return cell_; }

 private:
  char cell_;
};

class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what) : Error("degenerate", what) {}
};

class EmptyPopulationError : public Error {
 public:
  explicit EmptyPopulationError(const std::string& event_type)
      : Error("empty_population", "event type " + event_type + " has no events"),
        event_type_(event_type) {}

  const std::string& event_type() const noexcept { return event_type_; }

 private:
  std::string event_type_;
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error("infeasible", what) {}
};

}  // namespace madtasks
