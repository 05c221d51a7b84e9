/*******************************************************************************
 * Copyright 2026 The sketchov Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *******************************************************************************/
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace sketchov {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Error taxonomy. Each maps onto one CLI exit code (see cli.hpp).

/// Operand dimensions do not agree, or an index is out of range.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A value lies outside the domain where the operation is defined.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A tuning parameter (k, n_o, n_i, ...) is out of its admissible range.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A structural precondition of an algorithm is violated (e.g. a
/// non-hermitian operator handed to the hermitian eigensolver).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Persisted data is incomplete or corrupt.
struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem failure.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Process-wide warning sink. Defaults to stderr; tests swap it to capture
/// messages. Not synchronized: install it before spawning workers.
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace sketchov
