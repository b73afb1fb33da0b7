#pragma once

#include <stdexcept>
#include <string>

namespace vhs {

// Bad or incomplete configuration data (data files, missing symbols).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a model (f_MVC outside (0,1], negative time, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Scenario or model file failing schema validation.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The analysis ran but cannot produce a physically meaningful result.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vhs
