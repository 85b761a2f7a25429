#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ctpji/label.hpp"

namespace ctpji::cohort {

struct PatientRecord {
    std::string id;
    Label label = Label::Aseptic;
    std::vector<std::string> slices;  ///< paths, relative to the manifest's directory

    friend bool operator==(const PatientRecord&, const PatientRecord&) = default;
};

struct CohortManifest {
    std::vector<PatientRecord> patients;

    friend bool operator==(const CohortManifest&, const CohortManifest&) = default;
};

/// Throws InvalidManifest on duplicate ids.
void validate(const CohortManifest& manifest);

/// {"patients":[{"id":..,"label":"aseptic"|"infected","slices":[..]}]}
[[nodiscard]] std::string to_json(const CohortManifest& manifest);
[[nodiscard]] CohortManifest manifest_from_json(std::string_view text);
[[nodiscard]] CohortManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const CohortManifest& manifest);

inline constexpr std::size_t kBalancedSetSize = 12;  ///< 6 aseptic + 6 infected
inline constexpr std::size_t kValidationBlocks = 4;

/// Held-out test set, four validation blocks and the remaining training pool.
struct Splits {
    std::vector<std::string> d_x;
    std::array<std::vector<std::string>, kValidationBlocks> d_v;
    std::vector<std::string> d_t;
    std::uint64_t seed = 0;
    std::map<std::string, Label> labels;  ///< patient-level labels, carried for scoring

    friend bool operator==(const Splits&, const Splits&) = default;
};

/// Seeded, label-balanced partition. Needs at least 30 patients per label.
/// Throws InsufficientCohort.
[[nodiscard]] Splits make_splits(const CohortManifest& manifest, std::uint64_t seed);

/// Checks disjointness, balance and (when given) coverage of the manifest.
/// Throws InvalidSplits.
void validate(const Splits& splits);
void validate(const Splits& splits, const CohortManifest& manifest);

struct Fold {
    std::vector<std::string> train;
    std::vector<std::string> valid;
};

/// Configuration k in 1..4: valid = D_vk, train = D_t plus the other blocks.
/// Throws BadConfigIndex.
[[nodiscard]] Fold config(const Splits& splits, int k);

/// {"d_x":[..],"d_v":[[..]x4],"d_t":[..],"seed":n,"labels":{id:label}}
[[nodiscard]] std::string to_json(const Splits& splits);
[[nodiscard]] Splits splits_from_json(std::string_view text);
[[nodiscard]] Splits read_splits(const std::filesystem::path& path);
void write_splits(const std::filesystem::path& path, const Splits& splits);

}  // namespace ctpji::cohort
