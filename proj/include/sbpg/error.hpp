#pragma once

#include <stdexcept>
#include <string>

namespace sbpg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Topology violates the alternating actuator/state structure.
class GraphError : public Error {
 public:
  using Error::Error;
};

class MapFormatError : public Error {
 public:
  using Error::Error;
};

class MapVersionError : public MapFormatError {
 public:
  using MapFormatError::MapFormatError;
};

/// Normal-equation system is numerically singular.
class SingularFitError : public Error {
 public:
  using Error::Error;
};

class SimulationError : public Error {
 public:
  using Error::Error;
};

/// Malformed metrics file; the message names the offending line.
class MetricsFormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace sbpg
