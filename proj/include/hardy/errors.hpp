#pragma once

#include <stdexcept>
#include <string>

namespace hardy {

/// An enumeration or search was asked to exceed its configured budget.
class BudgetError : public std::runtime_error {
  public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// A query fell outside the computed support of an envelope or sequence
/// (the caller must extend the underlying scan rather than extrapolate).
class SupportError : public std::domain_error {
  public:
    explicit SupportError(const std::string& what) : std::domain_error(what) {}
};

/// A value violated a documented invariant of its type or operation.
class InvariantError : public std::logic_error {
  public:
    explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace hardy
