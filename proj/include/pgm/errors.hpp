// Copyright 2026 The PGM Authors
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

#ifndef PGM_ERRORS_HPP_
#define PGM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pgm {

// Every error raised by the library derives from Error. The module() tag is
// used by the CLI to prefix messages ("junction-tree: ...").
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(what), module_(std::move(module)) {}
  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

#define PGM_DEFINE_ERROR(Name, Module)                                  \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(Module, what) {}     \
  }

// tensor-core
PGM_DEFINE_ERROR(DomainError, "tensor-core");
PGM_DEFINE_ERROR(DomainMismatchError, "tensor-core");
PGM_DEFINE_ERROR(CliqueError, "tensor-core");
PGM_DEFINE_ERROR(DegenerateFactorError, "tensor-core");
PGM_DEFINE_ERROR(ConsistencyError, "tensor-core");

// junction-tree
PGM_DEFINE_ERROR(ParameterMismatchError, "junction-tree");
PGM_DEFINE_ERROR(FeasibilityError, "junction-tree");

// estimation
PGM_DEFINE_ERROR(MeasurementError, "estimation");
PGM_DEFINE_ERROR(CoverageError, "estimation");
PGM_DEFINE_ERROR(TotalUnidentifiableError, "estimation");
PGM_DEFINE_ERROR(EstimationError, "estimation");

// inference
PGM_DEFINE_ERROR(BlockParameterError, "inference");
PGM_DEFINE_ERROR(QueryError, "inference");

// mechanisms
PGM_DEFINE_ERROR(MechanismError, "mechanisms");
PGM_DEFINE_ERROR(BudgetError, "mechanisms");
PGM_DEFINE_ERROR(WorkloadError, "mechanisms");

// cli
PGM_DEFINE_ERROR(ParseError, "cli");
PGM_DEFINE_ERROR(ConfigError, "cli");

#undef PGM_DEFINE_ERROR

// Raised when an optimizer produces a non-finite loss or gradient.
class NumericFailureError : public Error {
 public:
  NumericFailureError(int iteration, const std::string& what)
      : Error("estimation", what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

}  // namespace pgm

#endif  // PGM_ERRORS_HPP_
