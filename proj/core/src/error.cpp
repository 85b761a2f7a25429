#include "ctpji/error.hpp"

namespace ctpji {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingPixelData: return "MissingPixelData";
        case ErrorCode::MissingTag: return "MissingTag";
        case ErrorCode::UnsupportedTransferSyntax: return "UnsupportedTransferSyntax";
        case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorCode::UnsupportedElement: return "UnsupportedElement";
        case ErrorCode::TruncatedElement: return "TruncatedElement";
        case ErrorCode::MalformedValue: return "MalformedValue";
        case ErrorCode::DuplicateElement: return "DuplicateElement";
        case ErrorCode::PixelDataNotLast: return "PixelDataNotLast";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
        case ErrorCode::EmptySelection: return "EmptySelection";
        case ErrorCode::DuplicateInstance: return "DuplicateInstance";
        case ErrorCode::PatientMismatch: return "PatientMismatch";
        case ErrorCode::NoContour: return "NoContour";
        case ErrorCode::CenterOutOfBounds: return "CenterOutOfBounds";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::InvalidManifest: return "InvalidManifest";
        case ErrorCode::InvalidSplits: return "InvalidSplits";
        case ErrorCode::InsufficientCohort: return "InsufficientCohort";
        case ErrorCode::BadConfigIndex: return "BadConfigIndex";
        case ErrorCode::EmptyPredictions: return "EmptyPredictions";
        case ErrorCode::InvalidThreshold: return "InvalidThreshold";
        case ErrorCode::MalformedCsv: return "MalformedCsv";
        case ErrorCode::MissingPredictions: return "MissingPredictions";
    }
    return "Unknown";
}

}  // namespace ctpji
