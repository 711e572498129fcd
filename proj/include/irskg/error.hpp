// SPDX-License-Identifier: Apache-2.0
//
// irskg - simulator for surface-assisted channel-reciprocity key generation
// Copyright (C) 2026 The irskg Authors
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

namespace irskg {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Violated precondition on sizes or parameter ranges.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Sequence lengths or dimensions of two inputs disagree.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// A series carries no variation, so no key material can be extracted from it.
class DegenerateEntropy : public Error {
public:
    using Error::Error;
};

// Input is too short for the requested statistic.
class InsufficientLength : public Error {
public:
    using Error::Error;
};

// Privacy amplification was asked for more output than the leakage budget allows.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

// Filesystem or stream failure while emitting artifacts.
class IoError : public Error {
public:
    using Error::Error;
};

inline void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw InvalidArgument(message);
    }
}

} // namespace irskg
