/*
   Copyright 2026 The mcaoi Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcaoi {

enum class ErrorCode {
    QuorumOutOfRange,
    NonPositiveRate,
    NonPositiveShift,
    DeadlineNotAboveShift,
    InvalidConfig,
    OverflowRisk,
    DegenerateConditioning,
    QuadratureNonConvergence,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::QuorumOutOfRange: return "QuorumOutOfRange";
    case ErrorCode::NonPositiveRate: return "NonPositiveRate";
    case ErrorCode::NonPositiveShift: return "NonPositiveShift";
    case ErrorCode::DeadlineNotAboveShift: return "DeadlineNotAboveShift";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::OverflowRisk: return "OverflowRisk";
    case ErrorCode::DegenerateConditioning: return "DegenerateConditioning";
    case ErrorCode::QuadratureNonConvergence: return "QuadratureNonConvergence";
    }
    return "Unknown";
}

/// Validation failures: the input itself is outside the model's domain.
constexpr bool is_validation_error(ErrorCode code) noexcept
{
    return code == ErrorCode::QuorumOutOfRange || code == ErrorCode::NonPositiveRate ||
           code == ErrorCode::NonPositiveShift || code == ErrorCode::DeadlineNotAboveShift ||
           code == ErrorCode::InvalidConfig;
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace mcaoi
