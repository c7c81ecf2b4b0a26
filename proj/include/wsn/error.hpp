// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wsn {

enum class ErrorCode {
    NonMonotonicAxis,
    NonPositiveRadius,
    CapMismatch,
    OutOfDomain,
    EmptyDeviceList,
    UnknownStageLabel,
    InvalidArgument,
    KExceedsPoints,
    HubCountNotBelowKits,
    TooFewSensors,
    DistanceBelowReference,
    CoincidentDevices,
    ShapeMismatch,
    UnknownDeviceId,
    NonPositiveGain,
    EmptyPeerSet,
    MissingColumn,
    DuplicateId,
    NonNumericCoordinate,
    SchemaViolation,
    InvariantViolation,
    FileNotFound,
    IoFailure,
    MissingUpstreamArtifact,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library. `field` names the offending input
// (a config path such as "weights.kit_mass_kg", a CSV column, a file) and
// `value` its textual value; either may be empty.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, std::string field = {}, std::string value = {});

    ErrorCode code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }
    const std::string& value() const noexcept { return value_; }
    const std::string& message() const noexcept { return message_; }

    // Same error with "<context>: " prefixed to the message.
    Error in(std::string_view context) const;

private:
    ErrorCode code_;
    std::string message_;
    std::string field_;
    std::string value_;
};

} // namespace wsn
