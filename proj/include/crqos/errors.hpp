#pragma once

#include <stdexcept>
#include <string>

namespace crqos {

/// Argument outside the mathematical domain of an operation (e.g. beta > 1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Denominator of the channel-distortion model vanished.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Inconsistent model or experiment parameters.
class ConfigError : public std::runtime_error {
 public:
  enum class Kind { MissingFile, Parse, Validation };

  ConfigError(Kind kind, std::string key, const std::string& what)
      : std::runtime_error(what), kind_(kind), key_(std::move(key)) {}
  ConfigError(Kind kind, const std::string& what) : ConfigError(kind, "", what) {}
  explicit ConfigError(const std::string& what) : ConfigError(Kind::Validation, "", what) {}

  Kind kind() const noexcept { return kind_; }
  /// Offending configuration key, empty when not applicable.
  const std::string& key() const noexcept { return key_; }

 private:
  Kind kind_;
  std::string key_;
};

/// Missing, corrupt, or mismatched policy artifact.
class ArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation produced an impossible or non-finite result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crqos
