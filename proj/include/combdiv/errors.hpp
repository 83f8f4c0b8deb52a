// Copyright 2026 The combdiv developers
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

#pragma once

#include <stdexcept>
#include <string>

namespace combdiv {

//=========================================================================
// Numerical tolerances
//=========================================================================

namespace tol {
inline constexpr double herm = 1e-9;      // hermiticity check
inline constexpr double psd = 1e-9;       // positive-semidefiniteness check
inline constexpr double trace = 1e-9;     // trace / marginal conditions
inline constexpr double eig = 1e-8;       // eigendecomposition residuals
inline constexpr double support = 1e-10;  // eigenvalues below this count as zero
}  // namespace tol

// Dense eigendecompositions get slow and memory-hungry past this side.
inline constexpr long kMaxOperatorSide = 4096;

//=========================================================================
// Error types
//=========================================================================

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DuplicateLabel : Error {
  using Error::Error;
};
struct UnknownLabel : Error {
  using Error::Error;
};
struct BadPermutation : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct ShapeMismatch : Error {
  using Error::Error;
};
struct NotHermitian : Error {
  using Error::Error;
};
struct NotDensityOperator : Error {
  using Error::Error;
};
struct NotTracePreserving : Error {
  using Error::Error;
};
struct NotADistribution : Error {
  using Error::Error;
};
struct BadStepIndex : Error {
  using Error::Error;
};
struct NotACombChoi : Error {
  using Error::Error;
};
struct DualityViolation : Error {
  using Error::Error;
};
struct UnknownScenario : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};

}  // namespace combdiv
