#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ctpji::dicom {

/// Metadata of one CT slice. Only the tags the pipeline needs are kept.
struct SliceMeta {
    std::string patient_id;
    std::int32_t instance_number = 0;
    int rows = 0;
    int cols = 0;
    double rescale_slope = 1.0;      ///< HU per raw unit
    double rescale_intercept = 0.0;  ///< HU
    int bits_allocated = 16;         ///< 8 or 16
    int pixel_representation = 0;   ///< 0 unsigned, 1 two's complement

    friend bool operator==(const SliceMeta&, const SliceMeta&) = default;
};

/// One parsed slice: metadata plus raw stored pixel values, row-major.
struct RawSlice {
    SliceMeta meta;
    std::vector<std::int32_t> pixels;

    friend bool operator==(const RawSlice&, const RawSlice&) = default;
};

/// Throws Error(InvariantViolation) if the slice is malformed.
void validate(const RawSlice& slice);

/// Parses the supported DICOM subset: optional 128-byte preamble + "DICM",
/// explicit or implicit VR little endian, uncompressed single-frame pixel data.
/// Unknown elements are skipped. PixelData must be the last element.
[[nodiscard]] RawSlice parse_dicom(std::span<const std::uint8_t> bytes);

/// Emits a Part-10 file (preamble, file meta group, explicit VR little endian).
/// Rescale values are written as DS and must fit 16 characters at full
/// round-trip precision; the patient id must be a valid LO value.
[[nodiscard]] std::vector<std::uint8_t> write_dicom_lite(const RawSlice& slice);

[[nodiscard]] RawSlice read_dicom_file(const std::filesystem::path& path);
void write_dicom_file(const std::filesystem::path& path, const RawSlice& slice);

}  // namespace ctpji::dicom
