// Copyright 2026 The dexgrasp Authors
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

namespace dexgrasp {

// Error taxonomy shared by all modules. The CLI maps these to exit codes:
// schema/config -> 2, missing artifact -> 3, numerical failure -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments at an API boundary: dof mismatch, missing keypoint, ...
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Structured-text document violates its schema (hand model, config, dataset).
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage was invoked before its upstream artifact exists.
class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

// Non-finite state, optimizer blowup, integrator divergence.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Physically inconsistent initial condition (interpenetration, below table).
class InvalidSetupError : public Error {
 public:
  using Error::Error;
};

}  // namespace dexgrasp
