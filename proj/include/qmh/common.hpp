#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qmh {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range user input (files, indices, parameters).
struct InputError : Error {
  using Error::Error;
};

// A construction or enumeration would exceed its configured cap.
struct BudgetError : Error {
  using Error::Error;
};

// Constraint compilation found two contexts pinning the same quantity to
// different values, i.e. the behaviour signals.
struct SignallingError : Error {
  using Error::Error;
};

inline constexpr std::size_t kDefaultAtomBudget = 4096;

} // namespace qmh
