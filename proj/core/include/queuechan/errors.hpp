#pragma once

#include <stdexcept>
#include <string>

namespace queuechan {

/// Base class for all queuechan errors. `kind()` is a stable machine-readable
/// tag; the CLI maps it into its JSON error objects.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(msg), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

/// Invalid parameter domain (rates outside (0,1), bad probabilities, ...).
struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error("DomainError", m) {}
};

/// Arrival rate >= service rate; the queue has no stationary regime.
struct StabilityViolation : Error {
  explicit StabilityViolation(const std::string& m) : Error("StabilityViolation", m) {}
};

/// The fixed-point bisection could not bracket a sign change.
struct NoBracket : Error {
  explicit NoBracket(const std::string& m) : Error("NoBracket", m) {}
};

/// The balance recursion produced a significantly negative mass.
struct RecursionUnstable : Error {
  explicit RecursionUnstable(const std::string& m) : Error("RecursionUnstable", m) {}
};

/// A model assumption required by a result does not hold (e.g. m_A(1) = 0).
struct AssumptionViolation : Error {
  explicit AssumptionViolation(const std::string& m) : Error("AssumptionViolation", m) {}
};

/// Batch-arrival rate convention produced a base outside (0,1).
struct ConventionError : Error {
  explicit ConventionError(const std::string& m) : Error("ConventionError", m) {}
};

/// Distributions that must share a mean do not.
struct MeanMismatch : Error {
  explicit MeanMismatch(const std::string& m) : Error("MeanMismatch", m) {}
};

/// A construction requires an integer mean (deterministic inter-arrival).
struct IntegralityError : Error {
  explicit IntegralityError(const std::string& m) : Error("IntegralityError", m) {}
};

/// Arrival/departure timestamp lists violate FIFO consistency.
struct InconsistentTimestamps : Error {
  explicit InconsistentTimestamps(const std::string& m) : Error("InconsistentTimestamps", m) {}
};

/// An observed (queue, noise) pair has zero probability under the model.
struct DegenerateNoise : Error {
  explicit DegenerateNoise(const std::string& m) : Error("DegenerateNoise", m) {}
};

/// A run configuration failed schema validation.
struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error("ConfigError", m) {}
};

/// Simulation aborted (runaway queue, likely lambda >= mu).
struct SimulationError : Error {
  explicit SimulationError(const std::string& m) : Error("SimulationError", m) {}
};

}  // namespace queuechan
