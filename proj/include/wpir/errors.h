// Copyright 2026 The WPIR Authors
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

#ifndef WPIR_ERRORS_H_
#define WPIR_ERRORS_H_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wpir {

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid scheme parameters, indices or malformed inputs.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A target download cost outside the range an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Rényi divergence is infinite because the support condition fails.
class DivergenceUndefinedError : public Error {
 public:
  using Error::Error;
};

// Normalization by a zero Rényi entropy.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

// A distribution that violates the primal constraints of the problem.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// The answers of an option do not determine the desired message.
class DecodeError : public Error {
 public:
  using Error::Error;
};

// The numeric oracle hit its iteration cap. Carries the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate,
                   double step_residual, double primal_residual)
      : Error(what),
        last_iterate_(std::move(last_iterate)),
        step_residual_(step_residual),
        primal_residual_(primal_residual) {}

  const std::vector<double>& last_iterate() const { return last_iterate_; }
  double step_residual() const { return step_residual_; }
  double primal_residual() const { return primal_residual_; }

 private:
  std::vector<double> last_iterate_;
  double step_residual_;
  double primal_residual_;
};

}  // namespace wpir

#endif  // WPIR_ERRORS_H_
