#pragma once

#include <stdexcept>
#include <string>

namespace softgait {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration value; message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// A query fell outside the x-range covered by a terrain profile.
class OutOfExtentError : public Error {
 public:
  using Error::Error;
};

class ConstructionError : public Error {
 public:
  using Error::Error;
};

// Non-finite body state. `time()` is the simulation time at which it was detected.
class UnstableSimulationError : public Error {
 public:
  UnstableSimulationError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class DegenerateOptimizerError : public Error {
 public:
  using Error::Error;
};

// Ask/tell protocol violation (e.g. tell with a batch that does not match the ask).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace softgait
