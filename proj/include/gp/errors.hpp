#pragma once

#include <stdexcept>
#include <string>

namespace gp {

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GeometryError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct StaggeringError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// (D - G_in) is numerically singular; carries the condition estimate.
struct SingularChannelError : std::runtime_error {
  double condition;
  double k1 = 0, k2 = 0;
  SingularChannelError(const std::string& what, double cond)
      : std::runtime_error(what), condition(cond) {}
};

struct ResourceError : std::runtime_error {
  double estimate;  // amplitudes requested
  ResourceError(const std::string& what, double est)
      : std::runtime_error(what), estimate(est) {}
};

struct ConvergenceError : std::runtime_error {
  double residual;
  ConvergenceError(const std::string& what, double res)
      : std::runtime_error(what), residual(res) {}
};

struct NumericalFloorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NondeterminateChern : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gp
