// Copyright 2026 The incompat Authors
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

namespace incompat {

enum class ErrorKind {
    NonHermitian,
    NoConvergence,
    DimMismatch,
    NotOrthonormal,
    NotPovm,
    LabelMismatch,
    LambdaOutOfRange,
    OutsideTriangle,
    NotProjector,
    NotCommuting,
    InvalidArgument,
    Parse,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonHermitian: return "NonHermitian";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::DimMismatch: return "DimMismatch";
        case ErrorKind::NotOrthonormal: return "NotOrthonormal";
        case ErrorKind::NotPovm: return "NotPovm";
        case ErrorKind::LabelMismatch: return "LabelMismatch";
        case ErrorKind::LambdaOutOfRange: return "LambdaOutOfRange";
        case ErrorKind::OutsideTriangle: return "OutsideTriangle";
        case ErrorKind::NotProjector: return "NotProjector";
        case ErrorKind::NotCommuting: return "NotCommuting";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Parse: return "Parse";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace incompat
