#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ctpji {

/// Every failure the library reports maps to one of these codes.
enum class ErrorCode {
    // dicom_lite
    MissingPixelData,
    MissingTag,
    UnsupportedTransferSyntax,
    UnsupportedFormat,
    UnsupportedElement,
    TruncatedElement,
    MalformedValue,
    DuplicateElement,
    PixelDataNotLast,
    ShapeMismatch,
    InvariantViolation,
    // hu_pipeline
    EmptySelection,
    DuplicateInstance,
    PatientMismatch,
    // contour_patch
    NoContour,
    CenterOutOfBounds,
    // phantom_synth / io
    InvalidSpec,
    IoFailure,
    // cohort_cv
    InvalidManifest,
    InvalidSplits,
    InsufficientCohort,
    BadConfigIndex,
    // metrics
    EmptyPredictions,
    InvalidThreshold,
    MalformedCsv,
    MissingPredictions,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code),
          message_(std::move(message)) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    /// Message without the error-code prefix.
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

}  // namespace ctpji
