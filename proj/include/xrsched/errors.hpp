// Copyright 2026 The xrsched Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef XRSCHED_ERRORS_HPP_
#define XRSCHED_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace xrsched {

// Invalid or inconsistent configuration (non-integer grid, bad action sets,
// checkpoint manifest mismatch, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Checkpoint file unreadable or its shape manifest does not match.
class ManifestError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Output file or directory could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Mini-slot length outside 1..14 symbols.
class MinislotError : public DomainError {
 public:
  using DomainError::DomainError;
};

// QoE requested for a non-positive rate.
class UndefinedQoeError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Caller broke an operation's precondition (masked action, empty batch, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Operation invoked in the wrong episode phase.
class LifecycleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Exhaustive search refused because the instance is too large.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace xrsched

#endif  // XRSCHED_ERRORS_HPP_
