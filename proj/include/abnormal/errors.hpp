#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace abnormal {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
  std::size_t offset;
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// integrator blow-up, singular solves, failed fits
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AssumptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace abnormal
