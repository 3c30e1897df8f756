// Copyright 2026 The stoqtraj Authors
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
#include <string_view>

namespace stoq {

enum class ErrorCode {
    NonHermitianInput,
    DimensionMismatch,
    InvalidTimeStep,
    InvalidArgument,
    NumericalBlowup,
    GridMismatch,
    MetadataMissing,
    ParseError,
    ValidationError,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonHermitianInput: return "NonHermitianInput";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidTimeStep: return "InvalidTimeStep";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NumericalBlowup: return "NumericalBlowup";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::MetadataMissing: return "MetadataMissing";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a stable machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require_time_step(double dt) {
    if (!(dt > 0.0)) {
        throw Error(ErrorCode::InvalidTimeStep, "time step must be positive, got " + std::to_string(dt));
    }
}

}  // namespace stoq
