#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace twomode {

struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IndexError : SimulationError {
    using SimulationError::SimulationError;
};

struct CapacityError : SimulationError {
    using SimulationError::SimulationError;
};

struct ShapeError : SimulationError {
    using SimulationError::SimulationError;
};

struct ResolutionError : SimulationError {
    using SimulationError::SimulationError;
};

struct NumericalError : SimulationError {
    using SimulationError::SimulationError;
};

// Thrown when an iterative solve exhausts its iteration budget.
struct ConvergenceError : SimulationError {
    ConvergenceError(const std::string& what, std::vector<double> history)
        : SimulationError(what), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

// Inner fixed-point loop of the time-evolution driver failed to settle.
struct DivergedStepError : SimulationError {
    DivergedStepError(const std::string& what, double when, std::vector<double> history)
        : SimulationError(what), time(when), residual_history(std::move(history)) {}
    double time;
    std::vector<double> residual_history;
};

struct ConfigError : SimulationError {
    explicit ConfigError(std::vector<std::string> errs)
        : SimulationError(join(errs)), violations(std::move(errs)) {}
    std::vector<std::string> violations;

  private:
    static std::string join(const std::vector<std::string>& errs) {
        std::string out = "invalid configuration:";
        for (const auto& e : errs) out += "\n  - " + e;
        return out;
    }
};

struct IoError : SimulationError {
    using SimulationError::SimulationError;
};

}  // namespace twomode
