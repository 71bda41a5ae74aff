// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mlergm {

/// Malformed or inconsistent input data (files, partitions, dyads).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or arguments supplied by the caller.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameter vector outside the domain of the natural-parameter map.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Estimation could not produce a usable estimate.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact enumeration refused because the state space is too large.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mlergm
