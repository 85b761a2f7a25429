#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "ctpji/contour.hpp"
#include "ctpji/grid.hpp"
#include "ctpji/hounsfield.hpp"

namespace ctpji::patch {

inline constexpr int kPatchSize = 188;
inline constexpr int kEqualizationBins = 4096;

struct Center {
    double row = 0.0;
    double col = 0.0;
};

/// Equalized region of interest of one slice.
struct Patch {
    Grid<float> pixels;  ///< values in [0, 1]
    std::string patient_id;
    std::int32_t instance_number = 0;
    Center centroid;
};

/// Pixel a real-valued center snaps to (nearest, halves round up).
[[nodiscard]] contour::Point snap(Center center) noexcept;

/// size x size window of HU values centred on snap(center). Pixels outside the
/// slice take the slice's minimum HU. Throws CenterOutOfBounds.
[[nodiscard]] Grid<float> extract_patch(const hu::HuSlice& slice, Center center, int size = kPatchSize);

/// Histogram equalization through the window's empirical CDF over `bins`
/// uniform bins spanning [min, max]. A constant window maps to zeros.
[[nodiscard]] Grid<float> equalize_hist(const Grid<float>& window, int bins = kEqualizationBins);

struct PatchParams {
    double bone_threshold_hu = hu::kBoneThresholdHu;
    int size = kPatchSize;
    int bins = kEqualizationBins;
};

/// Bone mask, contours, principal centroid, window, equalization.
[[nodiscard]] Patch make_patch(const hu::HuSlice& slice, const PatchParams& params = {});

/// "<patient_id>_<instance_number>.pgm"
[[nodiscard]] std::string patch_filename(const std::string& patient_id, std::int32_t instance_number);

/// 16-bit binary PGM (P5, maxval 65535, big-endian), value = round(pixel * 65535).
[[nodiscard]] std::string encode_pgm(const Grid<float>& pixels);
[[nodiscard]] Grid<float> decode_pgm(std::string_view bytes);

void write_pgm(const std::filesystem::path& path, const Grid<float>& pixels);
[[nodiscard]] Grid<float> read_pgm(const std::filesystem::path& path);

}  // namespace ctpji::patch
