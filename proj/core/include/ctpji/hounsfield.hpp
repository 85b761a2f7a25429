#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ctpji/dicom_lite.hpp"
#include "ctpji/grid.hpp"

namespace ctpji::hu {

inline constexpr double kProsthesisThresholdHu = 3000.0;
inline constexpr double kBoneThresholdHu = 1000.0;

/// Slice resampled into Hounsfield units, same shape as its source.
struct HuSlice {
    dicom::SliceMeta meta;
    Grid<float> hu;
};

struct BinaryMask {
    Grid<std::uint8_t> bits;  ///< 0 or 1
    double threshold_hu = 0.0;

    [[nodiscard]] int rows() const noexcept { return bits.rows; }
    [[nodiscard]] int cols() const noexcept { return bits.cols; }
    [[nodiscard]] bool at(int r, int c) const noexcept { return bits(r, c) != 0; }
};

/// h = p * slope + intercept, evaluated in double and stored as float.
[[nodiscard]] HuSlice to_hounsfield(const dicom::RawSlice& slice);

/// True iff at least one pixel is strictly above `threshold`.
[[nodiscard]] bool contains_prosthesis(const HuSlice& slice, double threshold = kProsthesisThresholdHu);

[[nodiscard]] BinaryMask bone_mask(const HuSlice& slice, double threshold = kBoneThresholdHu);

/// Lightweight view of a slice used for series selection.
struct SeriesEntry {
    std::string_view patient_id;
    std::int32_t instance_number = 0;
    bool has_prosthesis = false;
};

/// Indices of the prosthesis-bearing entries, ordered by instance number.
/// Throws PatientMismatch, DuplicateInstance or EmptySelection.
[[nodiscard]] std::vector<std::size_t> select_instances(std::span<const SeriesEntry> entries);

/// Keeps the prosthesis-bearing slices, sorted ascending by instance number.
[[nodiscard]] std::vector<HuSlice> select_series(std::vector<HuSlice> slices,
                                                 double threshold = kProsthesisThresholdHu);

}  // namespace ctpji::hu
