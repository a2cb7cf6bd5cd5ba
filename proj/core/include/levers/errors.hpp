#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace levers {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A graph or report document violates the schema. `path()` points at the
/// offending element, e.g. "influences[3].target".
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Structural analysis is undefined for factors that influence themselves.
class SelfLoopError : public Error {
 public:
  explicit SelfLoopError(std::vector<std::string> ids);

  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  std::vector<std::string> ids_;
};

class EmptyGraphError : public Error {
 public:
  EmptyGraphError() : Error("graph has no factors") {}
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  explicit NonFiniteError(std::size_t step)
      : Error("state became non-finite at step " + std::to_string(step)),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace levers
