// Copyright 2026 The hgx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace hgx {

// Error hierarchy shared by all modules. The service layer maps each kind to
// an HTTP status, so keep the set small and stable.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Identifier outside its valid range (node, edge, timestep, assertion).
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Value outside its mathematical domain (strength not in [0,1], bad fraction).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Shapes that must agree do not.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value during optimization.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Operation not allowed in the current lifecycle state.
class StateError : public Error {
 public:
  using Error::Error;
};

/// A second writer tried to start work that is already pending.
class ConflictError : public Error {
 public:
  using Error::Error;
};

/// Tree or log structure would be broken (cycles, unknown parents).
class StructureError : public Error {
 public:
  using Error::Error;
};

/// Duplicate or otherwise invalid name.
class NameError : public Error {
 public:
  using Error::Error;
};

/// Named entity does not exist.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Input text could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Persisted data was written by an incompatible version.
class IncompatibleError : public Error {
 public:
  using Error::Error;
};

/// Durable storage failed; the triggering operation was rolled back.
class AvailabilityError : public Error {
 public:
  using Error::Error;
};

/// A payload would exceed the per-level cell or item budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Metric undefined for the given data (e.g. AUC with a single class).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace hgx
