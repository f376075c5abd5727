// Copyright 2026 The dce-qfi Authors
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

namespace dce {

// Exit-code mapping used by the CLI: config 2, numerical 3, truncation 4.

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double t = -1.0)
        : std::runtime_error(what), time_(t) {}
    /// Simulation time at which the failure was detected, or -1 if unknown.
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Population leaked into the top Fock levels exceeds the allowed bound.
class TruncationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace dce
