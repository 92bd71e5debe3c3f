// Copyright 2026 The otaada Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OTAADA_ERRORS_H_
#define OTAADA_ERRORS_H_

#include <stdexcept>
#include <string>

namespace otaada {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates a type invariant (alpha outside (0,1], n0 < 1, ...).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// A mathematical function was evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The requested value is outside the attainable range of a function, e.g.
// g_inverse below inf g.
class OutOfRangeError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Bracketing root finder failed. Carries the last bracket it held.
class RootFindingError : public DomainError {
 public:
  RootFindingError(const std::string& what, double lo, double hi)
      : DomainError(what), lo_(lo), hi_(hi) {}
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

// A simulated session could not run to completion.
class SimulationError : public Error {
 public:
  using Error::Error;
};

}  // namespace otaada

#endif  // OTAADA_ERRORS_H_
