#pragma once

#include <stdexcept>
#include <string>

namespace bosecycles {

// Invalid input (bad shape, non-finite value, violated precondition on a parameter).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input outside the mathematical domain of the quantity (mu > 0, n > N, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical contract or structural invariant did not hold.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Request outside what this implementation supports (cost guards, k_max > 2).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bosecycles
