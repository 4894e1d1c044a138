#pragma once

#include <stdexcept>
#include <string>

namespace nsbandit {

/// Argument outside its documented domain (arm index, time step, round...).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A caller broke an estimator precondition, e.g. a comparison arm that is
/// not persistent on the requested rounds.
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// Generator parameters that cannot produce a legal environment.
class GenerationError : public std::runtime_error {
 public:
  explicit GenerationError(const std::string& what) : std::runtime_error(what) {}
};

/// Observation-mode mismatch between a policy and an environment.
class ModeError : public std::invalid_argument {
 public:
  explicit ModeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed or inconsistent run configuration / serialized document.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nsbandit
