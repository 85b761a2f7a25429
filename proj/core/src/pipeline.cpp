#include "ctpji/pipeline.hpp"

#include <algorithm>
#include <optional>

#include <json.hpp>

#include "ctpji/dicom_lite.hpp"
#include "ctpji/error.hpp"
#include "ctpji/parallel.hpp"
#include "io_util.hpp"

namespace ctpji::pipeline {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); };
    if (!(prosthesis_hu > 0.0) || !(bone_hu > 0.0)) bad("thresholds must be positive");
    if (patch_size < 1) bad("patch size must be >= 1");
    if (bins < 1) bad("bin count must be >= 1");
    if (!(aggregation_threshold >= 0.0 && aggregation_threshold <= 1.0)) bad("aggregation threshold must lie in [0, 1]");
}

std::vector<fs::path> patient_dirs(const fs::path& input_dir) {
    std::vector<fs::path> dirs;
    try {
        for (const auto& entry : fs::directory_iterator(input_dir)) {
            if (!entry.is_directory()) continue;
            const bool has_slices = std::any_of(fs::directory_iterator(entry.path()), fs::directory_iterator{},
                                                [](const auto& f) { return f.path().extension() == ".dcm"; });
            if (has_slices) dirs.push_back(entry.path());
        }
    } catch (const fs::filesystem_error& e) {
        throw Error(ErrorCode::IoFailure, e.what());
    }
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

PatientResult prepare_patient(const fs::path& patient_dir, const PipelineConfig& config) {
    std::vector<fs::path> files;
    try {
        for (const auto& entry : fs::directory_iterator(patient_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".dcm") files.push_back(entry.path());
        }
    } catch (const fs::filesystem_error& e) {
        throw Error(ErrorCode::IoFailure, e.what());
    }
    std::sort(files.begin(), files.end());

    struct SliceOutcome {
        std::string patient_id;
        std::int32_t instance = 0;
        bool has_prosthesis = false;
        std::optional<patch::Patch> patch;
    };
    std::vector<SliceOutcome> outcomes(files.size());
    const patch::PatchParams params{config.bone_hu, config.patch_size, config.bins};

    parallel_for(files.size(), config.jobs, [&](std::size_t k) {
        const auto raw = dicom::read_dicom_file(files[k]);
        const auto slice = hu::to_hounsfield(raw);
        auto& out = outcomes[k];
        out.patient_id = slice.meta.patient_id;
        out.instance = slice.meta.instance_number;
        out.has_prosthesis = hu::contains_prosthesis(slice, config.prosthesis_hu);
        if (out.has_prosthesis) out.patch = patch::make_patch(slice, params);
    });

    PatientResult result;
    result.source_dir = patient_dir;
    result.n_slices = files.size();
    result.patient_id = outcomes.empty() ? patient_dir.filename().string() : outcomes.front().patient_id;
    if (result.patient_id.empty() || result.patient_id == "." || result.patient_id == ".." ||
        result.patient_id.find_first_of("/\\:") != std::string::npos) {
        throw Error(ErrorCode::MalformedValue,
                    patient_dir.string() + ": patient id '" + result.patient_id + "' is not usable as a file name");
    }

    std::vector<hu::SeriesEntry> entries;
    entries.reserve(outcomes.size());
    for (const auto& o : outcomes) entries.push_back({o.patient_id, o.instance, o.has_prosthesis});
    std::vector<std::size_t> selected;
    try {
        selected = hu::select_instances(entries);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptySelection) throw Error(e.code(), patient_dir.string() + ": " + e.message());
        result.warning = "no slice above " + std::to_string(config.prosthesis_hu) + " HU, patient skipped";
        return result;
    }
    result.n_selected = selected.size();

    try {
        fs::create_directories(config.output_dir);
    } catch (const fs::filesystem_error& e) {
        throw Error(ErrorCode::IoFailure, e.what());
    }
    parallel_for(selected.size(), config.jobs, [&](std::size_t k) {
        const auto& p = *outcomes[selected[k]].patch;
        patch::write_pgm(config.output_dir / patch::patch_filename(p.patient_id, p.instance_number), p.pixels);
    });

    nlohmann::json patches = nlohmann::json::array();
    for (const auto k : selected) {
        const auto& p = *outcomes[k].patch;
        patches.push_back({{"file", patch::patch_filename(p.patient_id, p.instance_number)},
                           {"instance_number", p.instance_number},
                           {"centroid", {{"row", p.centroid.row}, {"col", p.centroid.col}}},
                           {"source", fs::relative(files[k], config.input_dir).generic_string()}});
    }
    const nlohmann::json sidecar = {{"patient_id", result.patient_id},
                                    {"patch_size", config.patch_size},
                                    {"bone_threshold_hu", config.bone_hu},
                                    {"prosthesis_threshold_hu", config.prosthesis_hu},
                                    {"patches", patches}};
    detail::write_text_file(config.output_dir / (result.patient_id + ".json"), sidecar.dump(2) + "\n");
    return result;
}

std::vector<PatientResult> prepare_all(const PipelineConfig& config) {
    config.validate();
    std::vector<PatientResult> results;
    for (const auto& dir : patient_dirs(config.input_dir)) results.push_back(prepare_patient(dir, config));
    return results;
}

}  // namespace ctpji::pipeline
