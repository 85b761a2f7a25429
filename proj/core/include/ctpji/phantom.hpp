#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ctpji/cohort.hpp"
#include "ctpji/dicom_lite.hpp"
#include "ctpji/grid.hpp"
#include "ctpji/label.hpp"

namespace ctpji::phantom {

/// Radiodensities of the synthetic tissues, in HU.
struct Densities {
    double air = -1000.0;
    double soft_tissue = 40.0;
    double marrow = 300.0;
    double bone = 1150.0;
    double implant = 8000.0;
    double tissue_noise = 15.0;  ///< half-width of the uniform noise on air, tissue and marrow
    double bone_noise = 40.0;
    double implant_noise = 50.0;
};

/// Cross-section geometry, in pixels. The implant sits inside the bone's
/// inner radius; the infection band hugs the outer bone border.
struct Geometry {
    double center_row = 256.0;
    double center_col = 256.0;
    double body_radius = 215.0;
    double bone_inner_radius = 45.0;
    double bone_outer_radius = 62.0;
    double implant_radius = 22.0;
    double band_width = 12.0;           ///< maximum radial extent of the band
    double band_amplitude_min = 200.0;  ///< HU added inside the band
    double band_amplitude_max = 400.0;
    std::array<double, 3> band_phases{0.0, 0.0, 0.0};  ///< radians, shape the irregular outline
};

struct PhantomSpec {
    std::string patient_id;
    Label label = Label::Aseptic;
    int num_slices = 10;
    int implant_first = 1;  ///< first implant-bearing instance number (1-based, inclusive)
    int implant_last = 10;  ///< last implant-bearing instance number (inclusive)
    int image_size = 512;
    std::uint64_t seed = 0;
    Geometry geometry;
    Densities densities;
    double rescale_slope = 1.0;
    double rescale_intercept = -1024.0;
};

/// Throws InvalidSpec.
void validate(const PhantomSpec& spec);

/// Geometry drawn from `seed`, scaled to the image size.
[[nodiscard]] Geometry random_geometry(std::uint64_t seed, int image_size);

[[nodiscard]] bool has_implant(const PhantomSpec& spec, int instance_number) noexcept;

/// Pixels that receive the periosteal texture on this slice if the patient is
/// infected. Independent of the label; empty on implant-free slices.
[[nodiscard]] Grid<std::uint8_t> infection_band(const PhantomSpec& spec, int instance_number);

/// One slice, instance numbers run 1..num_slices.
[[nodiscard]] dicom::RawSlice generate_slice(const PhantomSpec& spec, int instance_number);

[[nodiscard]] std::vector<dicom::RawSlice> generate_patient(const PhantomSpec& spec);

struct CohortOptions {
    int n_aseptic = 50;
    int n_infected = 52;
    std::uint64_t seed = 0;
    int image_size = 512;
    int min_slices = 39;
    int max_slices = 191;
    unsigned jobs = 0;
};

/// Deterministic per-patient specs; ids are P001, P002, ... with labels shuffled.
[[nodiscard]] std::vector<PhantomSpec> plan_cohort(const CohortOptions& options);

/// Writes <out>/<patient_id>/<instance>.dcm, <out>/manifest.json and
/// <out>/phantom_truth.json (implant ranges). Returns the manifest.
cohort::CohortManifest generate_cohort(const CohortOptions& options, const std::filesystem::path& out_dir);

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kTruthFile = "phantom_truth.json";

}  // namespace ctpji::phantom
