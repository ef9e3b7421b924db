#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ernmf {

using Index = std::ptrdiff_t;
using IndexList = std::vector<Index>;

// Bad or inconsistent caller-provided data.  The CLI maps this family to exit
// code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Requested rank exceeds what the data supports, or a matrix that must be
// full-rank is not.
class RankError : public InputError {
 public:
  RankError(const std::string& what, Index numerical_rank)
      : InputError(what), numerical_rank(numerical_rank) {}
  Index numerical_rank;
};

// The candidate set produced by the exact rounding path has the wrong
// cardinality; the caller should fall back to the practical path with a
// selector.
class AmbiguousActiveSetError : public InputError {
 public:
  AmbiguousActiveSetError(const std::string& what, IndexList candidates)
      : InputError(what), candidate_set(std::move(candidates)) {}
  IndexList candidate_set;
};

// An iterative routine failed to meet its tolerance.  The CLI maps this
// family to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class NonConvergenceError : public NumericalError {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : NumericalError(what), residual(residual) {}
  double residual;
};

}  // namespace ernmf
