// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
#pragma once

#include <stdexcept>
#include <string>

namespace sg {

// Thrown for arguments outside the mathematical domain (negative density, |u| > k, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Operation defined only for a parameter range the law does not meet.
struct NotApplicable : std::logic_error {
  using std::logic_error::logic_error;
};

// Bad user configuration.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Blowup, non-convergence, failed bracketing.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sg
