// SPDX-License-Identifier: Apache-2.0

#include "wsn/error.hpp"

namespace wsn {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::NonMonotonicAxis: return "NonMonotonicAxis";
    case ErrorCode::NonPositiveRadius: return "NonPositiveRadius";
    case ErrorCode::CapMismatch: return "CapMismatch";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::EmptyDeviceList: return "EmptyDeviceList";
    case ErrorCode::UnknownStageLabel: return "UnknownStageLabel";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::KExceedsPoints: return "KExceedsPoints";
    case ErrorCode::HubCountNotBelowKits: return "HubCountNotBelowKits";
    case ErrorCode::TooFewSensors: return "TooFewSensors";
    case ErrorCode::DistanceBelowReference: return "DistanceBelowReference";
    case ErrorCode::CoincidentDevices: return "CoincidentDevices";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::UnknownDeviceId: return "UnknownDeviceId";
    case ErrorCode::NonPositiveGain: return "NonPositiveGain";
    case ErrorCode::EmptyPeerSet: return "EmptyPeerSet";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::NonNumericCoordinate: return "NonNumericCoordinate";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::MissingUpstreamArtifact: return "MissingUpstreamArtifact";
    }
    return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& message, const std::string& field,
                    const std::string& value)
{
    std::string out{to_string(code)};
    out += ": ";
    out += message;
    if (!field.empty()) {
        out += " [";
        out += field;
        if (!value.empty()) {
            out += " = ";
            out += value;
        }
        out += "]";
    }
    return out;
}

} // namespace

Error::Error(ErrorCode code, std::string message, std::string field, std::string value)
    : std::runtime_error(compose(code, message, field, value)),
      code_(code),
      message_(std::move(message)),
      field_(std::move(field)),
      value_(std::move(value))
{
}

Error Error::in(std::string_view context) const
{
    return Error(code_, std::string(context) + ": " + message_, field_, value_);
}

} // namespace wsn
