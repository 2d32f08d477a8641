#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ssr {

class SeparationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, double cond) : std::runtime_error(what), condition(cond) {}
  double condition;
};

class RankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergedError : public std::runtime_error {
 public:
  NonConvergedError(const std::string& what, std::vector<double> history = {})
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

class MaxIterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptySupportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ssr
