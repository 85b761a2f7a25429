#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctpji/cohort.hpp"
#include "ctpji/error.hpp"
#include "ctpji/metrics.hpp"
#include "ctpji/phantom.hpp"
#include "ctpji/pipeline.hpp"

namespace ctpji::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSeedEnv = "CTPJI_SEED";

/// Raised by a command for a usage problem CLI11 cannot see (e.g. empty input dir).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SynthArgs {
    int aseptic = 0;
    int infected = 0;
    std::uint64_t seed = 0;
    std::string out;
    int size = 512;
    int min_slices = 39;
    int max_slices = 191;
    unsigned jobs = 0;
};

struct PrepArgs {
    pipeline::PipelineConfig config;
    std::string in;
    std::string out;
};

struct SplitArgs {
    std::string manifest;
    std::uint64_t seed = 0;
    std::string out = "splits.json";
};

struct MetricsArgs {
    std::vector<std::string> preds;
    std::vector<int> configs;
    std::string splits;
    std::string manifest;
    double threshold = 0.5;
    std::string json_out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
    phantom::CohortOptions options;
    options.n_aseptic = a.aseptic;
    options.n_infected = a.infected;
    options.seed = a.seed;
    options.image_size = a.size;
    options.min_slices = a.min_slices;
    options.max_slices = a.max_slices;
    options.jobs = a.jobs;
    const auto manifest = phantom::generate_cohort(options, a.out);
    err << "synth: wrote " << manifest.patients.size() << " patients to " << a.out << '\n';
    out << (fs::path(a.out) / phantom::kManifestFile).string() << '\n';
    return kExitOk;
}

int cmd_prep(PrepArgs& a, std::ostream& out, std::ostream& err) {
    a.config.input_dir = a.in;
    a.config.output_dir = a.out;
    try {
        a.config.validate();
    } catch (const Error& e) {
        throw UsageError(e.message());
    }
    const auto dirs = pipeline::patient_dirs(a.config.input_dir);
    if (dirs.empty()) throw UsageError("no patient folders with .dcm files under " + a.in);

    const auto start = std::chrono::steady_clock::now();
    std::size_t skipped = 0;
    for (const auto& dir : dirs) {
        const auto result = pipeline::prepare_patient(dir, a.config);
        if (result.warning) {
            ++skipped;
            err << "warning: " << result.patient_id << ": " << *result.warning << '\n';
        }
        out << result.patient_id << '\t' << result.n_selected << '\t' << result.n_slices << '\n';
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    err << "prep: " << dirs.size() << " patients (" << skipped << " skipped) in " << elapsed.count() << " s\n";
    return kExitOk;
}

int cmd_split(const SplitArgs& a, std::ostream& out, std::ostream& err) {
    const auto manifest = cohort::read_manifest(a.manifest);
    const auto splits = cohort::make_splits(manifest, a.seed);
    cohort::write_splits(a.out, splits);
    err << "split: d_x=" << splits.d_x.size() << " d_v=4x" << cohort::kBalancedSetSize << " d_t=" << splits.d_t.size()
        << '\n';
    out << a.out << '\n';
    return kExitOk;
}

int cmd_metrics(MetricsArgs& a, std::ostream& out, std::ostream&) {
    if (a.configs.empty()) {
        for (std::size_t k = 0; k < a.preds.size(); ++k) a.configs.push_back(static_cast<int>(k) + 1);
    }
    if (a.configs.size() != a.preds.size()) throw UsageError("--config must be given once per --preds file");

    auto splits = cohort::read_splits(a.splits);
    if (!a.manifest.empty()) {
        for (const auto& p : cohort::read_manifest(a.manifest).patients) splits.labels[p.id] = p.label;
    }
    if (splits.labels.empty()) throw UsageError("no patient labels: the splits file has none, pass --manifest");

    std::vector<metrics::ConfigPredictions> runs;
    for (std::size_t k = 0; k < a.preds.size(); ++k) {
        runs.push_back({a.configs[k], metrics::read_predictions_csv(a.preds[k])});
    }
    const auto table = metrics::table_report(runs, splits, a.threshold);
    out << metrics::format_table(table);
    if (!a.json_out.empty()) {
        std::ofstream json(a.json_out, std::ios::binary | std::ios::trunc);
        json << metrics::table_to_json(table);
        if (!json) throw Error(ErrorCode::IoFailure, "cannot write " + a.json_out);
    }
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"CT preprocessing and evaluation pipeline for periprosthetic joint infection detection", "ctpji"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic phantom cohort of DICOM series");
    synth_cmd->add_option("--aseptic", synth.aseptic, "Number of aseptic patients")
        ->required()->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--infected", synth.infected, "Number of infected patients")
        ->required()->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--seed", synth.seed, "Random seed")->envname(kSeedEnv);
    synth_cmd->add_option("--out", synth.out, "Output directory")->required();
    synth_cmd->add_option("--size", synth.size, "Image side in pixels")->capture_default_str()->check(CLI::Range(16, 4096));
    synth_cmd->add_option("--min-slices", synth.min_slices, "Fewest slices per patient")->capture_default_str()
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--max-slices", synth.max_slices, "Most slices per patient")->capture_default_str()
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--jobs", synth.jobs, "Worker threads (0 = all cores)");

    PrepArgs prep;
    auto* prep_cmd = app.add_subcommand("prep", "Select implant slices and extract equalized patches");
    prep_cmd->add_option("--in", prep.in, "Directory of patient folders")->required()->check(CLI::ExistingDirectory);
    prep_cmd->add_option("--out", prep.out, "Patch output directory")->required();
    prep_cmd->add_option("--prosthesis-hu", prep.config.prosthesis_hu, "Slice selection threshold (HU)")
        ->capture_default_str();
    prep_cmd->add_option("--bone-hu", prep.config.bone_hu, "Bone mask threshold (HU)")->capture_default_str();
    prep_cmd->add_option("--patch-size", prep.config.patch_size, "Patch side in pixels")->capture_default_str();
    prep_cmd->add_option("--bins", prep.config.bins, "Equalization histogram bins")->capture_default_str();
    prep_cmd->add_option("--jobs", prep.config.jobs, "Worker threads (0 = all cores)");

    SplitArgs split;
    auto* split_cmd = app.add_subcommand("split", "Partition a cohort into D_x, D_v1..4 and D_t");
    split_cmd->add_option("--manifest", split.manifest, "Cohort manifest JSON")->required()->check(CLI::ExistingFile);
    split_cmd->add_option("--seed", split.seed, "Random seed")->envname(kSeedEnv);
    split_cmd->add_option("--out", split.out, "Output splits JSON")->capture_default_str();

    MetricsArgs metrics;
    auto* metrics_cmd = app.add_subcommand("metrics", "Per-patient accuracy and F-score on the test set");
    metrics_cmd->add_option("--preds", metrics.preds, "Prediction CSV (repeat per configuration)")
        ->required()->check(CLI::ExistingFile);
    metrics_cmd->add_option("--config", metrics.configs, "Configuration index of each --preds file")
        ->check(CLI::Range(1, 4));
    metrics_cmd->add_option("--splits", metrics.splits, "Splits JSON")->required()->check(CLI::ExistingFile);
    metrics_cmd->add_option("--manifest", metrics.manifest, "Cohort manifest supplying labels")
        ->check(CLI::ExistingFile);
    metrics_cmd->add_option("--threshold", metrics.threshold, "Patient aggregation threshold")
        ->capture_default_str()->check(CLI::Range(0.0, 1.0));
    metrics_cmd->add_option("--json", metrics.json_out, "Also write the report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (synth_cmd->parsed()) return cmd_synth(synth, out, err);
        if (prep_cmd->parsed()) return cmd_prep(prep, out, err);
        if (split_cmd->parsed()) return cmd_split(split, out, err);
        if (metrics_cmd->parsed()) return cmd_metrics(metrics, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::InvalidSpec ? kExitUsage : kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace ctpji::cli
