#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ctpji/hounsfield.hpp"
#include "ctpji/patch.hpp"

namespace ctpji::pipeline {

/// Constants and paths for the preprocessing run.
struct PipelineConfig {
    std::filesystem::path input_dir;
    std::filesystem::path output_dir;
    double prosthesis_hu = hu::kProsthesisThresholdHu;
    double bone_hu = hu::kBoneThresholdHu;
    int patch_size = patch::kPatchSize;
    int bins = patch::kEqualizationBins;
    std::uint64_t split_seed = 0;
    double aggregation_threshold = 0.5;
    unsigned jobs = 0;  ///< 0 = all hardware threads

    /// Throws InvalidSpec.
    void validate() const;
};

struct PatientResult {
    std::string patient_id;
    std::filesystem::path source_dir;
    std::size_t n_slices = 0;
    std::size_t n_selected = 0;
    std::optional<std::string> warning;  ///< set when the patient was skipped
};

/// Patient folders (sub-directories holding *.dcm files) under `input_dir`, sorted.
[[nodiscard]] std::vector<std::filesystem::path> patient_dirs(const std::filesystem::path& input_dir);

/// Parses every slice of one patient folder, selects the prosthesis-bearing
/// ones and writes <patient_id>_<instance>.pgm plus <patient_id>.json into the
/// output directory. A patient without any implant slice is skipped with a
/// warning; parse failures throw with the offending path.
PatientResult prepare_patient(const std::filesystem::path& patient_dir, const PipelineConfig& config);

std::vector<PatientResult> prepare_all(const PipelineConfig& config);

}  // namespace ctpji::pipeline
