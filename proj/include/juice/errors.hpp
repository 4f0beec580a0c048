// SPDX-License-Identifier: Apache-2.0
//
// juice-amp: activity detection and channel estimation for grant-free access
// Copyright (C) 2026 The juice-amp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace juice
{
    // Malformed numeric input (non-finite entries, non-square matrices, size mismatches)
    class InputError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Invalid configuration values
    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    class NotPsdError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class SingularError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // The AMP state left its admissible set (e.g. a non positive-definite noise covariance)
    class StateError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class DegenerateSpectrumError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Statistic requested from a sample that cannot define it (e.g. miss rate without active users)
    class UndefinedStatisticError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class IoError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // A sweep point exceeded the admissible AMP divergence rate
    class SweepAborted : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
}
