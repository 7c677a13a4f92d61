// Error types shared across the solver.
#pragma once

#include <stdexcept>
#include <string>

namespace ccs {

// A transition probability left [0,1] for some (t, x, a) triple.
class CflViolation : public std::runtime_error {
public:
    CflViolation(double t, double x, double a, double offending,
                 const std::string& what_part)
        : std::runtime_error("CFL violation at (t=" + std::to_string(t) +
                             ", x=" + std::to_string(x) + ", a=" + std::to_string(a) +
                             "): " + what_part + " = " + std::to_string(offending)),
          t(t), x(x), a(a), value(offending) {}

    double t, x, a, value;
};

// NaN or mass leak detected during a sweep; carries the grid location.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& msg, int time_index, int grid_index)
        : std::runtime_error(msg + " at (k=" + std::to_string(time_index) +
                             ", j=" + std::to_string(grid_index) + ")"),
          time_index(time_index), grid_index(grid_index) {}

    int time_index, grid_index;
};

// Config file problem, anchored to a line number (0 = whole file).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& file, int line, const std::string& msg)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg),
          file(file), line(line) {}

    std::string file;
    int line;
};

} // namespace ccs
