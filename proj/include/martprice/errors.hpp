// Copyright 2026 The martprice Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace martprice {

enum class ErrorKind {
  kInvalidInput,
  kParse,
  kInfeasible,
  kNotLeastSquares,
  kSolver,
  kIterationLimit,
  kSingularBasis,
  kPriceFloor,
};

class PricingError : public std::runtime_error {
 public:
  PricingError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit codes used by the command-line front end.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput:
    case ErrorKind::kParse:
      return 2;
    case ErrorKind::kInfeasible:
      return 3;
    case ErrorKind::kNotLeastSquares:
      return 4;
    default:
      return 5;
  }
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw PricingError(kind, what);
}

}  // namespace martprice
