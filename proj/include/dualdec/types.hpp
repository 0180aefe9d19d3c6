#ifndef DUALDEC_TYPES_HPP_
#define DUALDEC_TYPES_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dualdec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Input violates a structural precondition (dimensions, signs, bounds).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A local or centralized program has no feasible point.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The numerical kernel could not produce a certified answer.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace dualdec

#endif  // DUALDEC_TYPES_HPP_
