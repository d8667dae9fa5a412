// Copyright 2026 The qstsim Authors
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

namespace qstsim {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Operands with incompatible Hilbert-space dimensions, or a bad subsystem index.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A physical symbol is missing, out of range, or makes a formula singular.
/// `symbol()` names the offending field of ModelParams.
class ParameterError : public Error {
  public:
    ParameterError(std::string symbol, const std::string& what)
        : Error(symbol + ": " + what), symbol_(std::move(symbol)) {}

    const std::string& symbol() const noexcept { return symbol_; }

  private:
    std::string symbol_;
};

/// The parameters fall outside the regime a closed form or solver supports
/// (non-oscillatory D, overdamped B', degenerate spectrum).
class RegimeError : public Error {
  public:
    using Error::Error;
};

/// Integrator failure: step-size underflow or a violated accuracy contract.
class SolverError : public Error {
  public:
    using Error::Error;
};

/// Root-finding target outside the searchable bracket.
class CalibrationError : public Error {
  public:
    using Error::Error;
};

/// Malformed scenario configuration or serialized data.
class ConfigError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace qstsim
