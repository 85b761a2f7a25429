#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctpji/cohort.hpp"
#include "ctpji/label.hpp"

namespace ctpji::metrics {

/// Probability above which a slice counts as infected. A tie goes to aseptic.
inline constexpr double kSliceDecisionThreshold = 0.5;

struct SlicePrediction {
    std::string patient_id;
    std::int32_t instance_number = 0;
    double prob_infected = 0.0;

    [[nodiscard]] Label predicted_class() const noexcept {
        return prob_infected > kSliceDecisionThreshold ? Label::Infected : Label::Aseptic;
    }
};

struct PatientReport {
    std::string patient_id;
    Label label = Label::Aseptic;
    std::size_t n_images = 0;
    std::size_t n_correct = 0;
    double accuracy = 0.0;
    double f_score = 0.0;
    Label aggregated_class = Label::Aseptic;
};

/// Share of slices whose predicted class equals the patient label.
/// Throws EmptyPredictions or PatientMismatch.
[[nodiscard]] double patient_accuracy(std::span<const SlicePrediction> preds, Label label);

/// F = 2PR / (P + R) with the patient's own label as the positive class. A
/// single-label patient has no false positives, so P = 1 whenever any slice
/// is predicted positive and F = 2 ACC / (1 + ACC); F = 0 otherwise.
[[nodiscard]] double patient_fscore(std::span<const SlicePrediction> preds, Label label);

/// The closed form above.
[[nodiscard]] constexpr double fscore_from_accuracy(double accuracy) noexcept {
    return accuracy > 0.0 ? 2.0 * accuracy / (1.0 + accuracy) : 0.0;
}

/// Infected iff the share of slices predicted infected is strictly above threshold.
/// Throws EmptyPredictions or InvalidThreshold.
[[nodiscard]] Label aggregate_patient(std::span<const SlicePrediction> preds, double threshold = 0.5);

[[nodiscard]] PatientReport patient_report(std::span<const SlicePrediction> preds, Label label,
                                           double threshold = 0.5);

/// Predictions of one trained configuration (1..4) on the test set.
struct ConfigPredictions {
    int config = 1;
    std::vector<SlicePrediction> predictions;
};

struct TableRow {
    int number = 0;  ///< 1-based, aseptic patients first, then infected, each by id
    std::string patient_id;
    Label label = Label::Aseptic;
    std::size_t n_images = 0;
    std::map<int, PatientReport> by_config;
};

struct Table {
    std::vector<int> configs;
    std::vector<TableRow> rows;
};

/// Per-patient ACC/F for every D_x patient under every supplied configuration.
/// Labels come from `splits.labels`. Throws MissingPredictions.
[[nodiscard]] Table table_report(std::span<const ConfigPredictions> runs, const cohort::Splits& splits,
                                 double threshold = 0.5);

[[nodiscard]] std::string format_table(const Table& table);
[[nodiscard]] std::string table_to_json(const Table& table);

/// CSV with header `patient_id,instance_number,prob_infected`. Throws MalformedCsv.
[[nodiscard]] std::vector<SlicePrediction> parse_predictions_csv(std::string_view text);
[[nodiscard]] std::vector<SlicePrediction> read_predictions_csv(const std::filesystem::path& path);
[[nodiscard]] std::string to_csv(std::span<const SlicePrediction> preds);

}  // namespace ctpji::metrics
