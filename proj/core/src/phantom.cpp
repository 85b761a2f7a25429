#include "ctpji/phantom.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "ctpji/error.hpp"
#include "ctpji/parallel.hpp"
#include "ctpji/random.hpp"
#include "io_util.hpp"

namespace ctpji::phantom {

namespace {

constexpr std::uint64_t kBandStream = 0xB4D5EEDull;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); }

double radius_of(const Geometry& g, int r, int c) {
    return std::hypot(static_cast<double>(r) - g.center_row, static_cast<double>(c) - g.center_col);
}

/// Irregular radial extent of the band at the pixel's polar angle.
double band_extent(const Geometry& g, int r, int c) {
    const double theta = std::atan2(static_cast<double>(r) - g.center_row, static_cast<double>(c) - g.center_col);
    const double wobble = (std::sin(3.0 * theta + g.band_phases[0]) + std::sin(5.0 * theta + g.band_phases[1]) +
                           std::sin(7.0 * theta + g.band_phases[2])) / 3.0;
    return g.band_width * (0.55 + 0.45 * 0.5 * (wobble + 1.0));
}

bool in_band(const Geometry& g, int r, int c) {
    const double d = radius_of(g, r, c);
    if (d <= g.bone_outer_radius || d > g.body_radius) return false;
    return d <= g.bone_outer_radius + band_extent(g, r, c);
}

std::int32_t to_raw(double hu, const PhantomSpec& spec) {
    const double raw = std::round((hu - spec.rescale_intercept) / spec.rescale_slope);
    return static_cast<std::int32_t>(std::clamp(raw, 0.0, 65535.0));
}

std::string patient_id_for(std::size_t index, std::size_t total) {
    const std::size_t width = std::max<std::size_t>(3, std::to_string(total).size());
    std::string digits = std::to_string(index + 1);
    return "P" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

}  // namespace

void validate(const PhantomSpec& spec) {
    const auto& g = spec.geometry;
    const auto& d = spec.densities;
    if (spec.patient_id.empty() || spec.patient_id.size() > 64) invalid("patient_id must be 1..64 characters");
    for (const char ch : spec.patient_id) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_' && ch != '.') {
            invalid("patient_id may only hold letters, digits, '-', '_' and '.'");
        }
    }
    if (spec.num_slices < 1) invalid("num_slices must be >= 1");
    if (spec.implant_first < 1 || spec.implant_first > spec.implant_last || spec.implant_last > spec.num_slices) {
        invalid("implant range must satisfy 1 <= first <= last <= num_slices");
    }
    if (spec.image_size < 16 || spec.image_size > 4096) invalid("image_size must be in [16, 4096]");
    if (!(g.implant_radius > 0.0 && g.implant_radius < g.bone_inner_radius &&
          g.bone_inner_radius < g.bone_outer_radius)) {
        invalid("radii must satisfy 0 < implant < bone inner < bone outer");
    }
    if (!(g.band_width > 0.0) || g.bone_outer_radius + g.band_width >= g.body_radius) {
        invalid("band must be positive and stay inside the body");
    }
    const double size = spec.image_size;
    if (g.center_row < 0 || g.center_col < 0 || g.center_row >= size || g.center_col >= size) {
        invalid("center must lie inside the image");
    }
    if (!(0.0 <= g.band_amplitude_min && g.band_amplitude_min <= g.band_amplitude_max)) {
        invalid("band amplitudes must satisfy 0 <= min <= max");
    }
    if (!(spec.rescale_slope > 0.0)) invalid("rescale_slope must be positive");
    const double lowest = std::min({d.air - d.tissue_noise, d.soft_tissue - d.tissue_noise, d.marrow - d.tissue_noise,
                                    d.bone - d.bone_noise, d.implant - d.implant_noise});
    const double highest = std::max({d.implant + d.implant_noise, d.bone + d.bone_noise,
                                     d.soft_tissue + d.tissue_noise + g.band_amplitude_max});
    const double raw_lo = (lowest - spec.rescale_intercept) / spec.rescale_slope;
    const double raw_hi = (highest - spec.rescale_intercept) / spec.rescale_slope;
    if (raw_lo < 0.0 || raw_hi > 65535.0) invalid("densities do not fit unsigned 16-bit storage");
}

Geometry random_geometry(std::uint64_t seed, int image_size) {
    rng::Engine engine(rng::derive(seed, "geometry"));
    const double s = image_size / 512.0;
    Geometry g;
    g.center_row = image_size / 2.0 + rng::uniform(engine, -20.0, 20.0) * s;
    g.center_col = image_size / 2.0 + rng::uniform(engine, -20.0, 20.0) * s;
    g.body_radius = 0.42 * image_size;
    g.bone_outer_radius = rng::uniform(engine, 55.0, 70.0) * s;
    g.bone_inner_radius = g.bone_outer_radius - rng::uniform(engine, 14.0, 20.0) * s;
    g.implant_radius = rng::uniform(engine, 18.0, 26.0) * s;
    g.band_width = rng::uniform(engine, 10.0, 16.0) * s;
    for (auto& phase : g.band_phases) phase = rng::uniform(engine, 0.0, 2.0 * std::numbers::pi);
    return g;
}

bool has_implant(const PhantomSpec& spec, int instance_number) noexcept {
    return instance_number >= spec.implant_first && instance_number <= spec.implant_last;
}

Grid<std::uint8_t> infection_band(const PhantomSpec& spec, int instance_number) {
    validate(spec);
    Grid<std::uint8_t> band(spec.image_size, spec.image_size, 0);
    if (!has_implant(spec, instance_number)) return band;
    for (int r = 0; r < spec.image_size; ++r) {
        for (int c = 0; c < spec.image_size; ++c) band(r, c) = in_band(spec.geometry, r, c);
    }
    return band;
}

dicom::RawSlice generate_slice(const PhantomSpec& spec, int instance_number) {
    validate(spec);
    if (instance_number < 1 || instance_number > spec.num_slices) invalid("instance number out of range");

    const auto& g = spec.geometry;
    const auto& d = spec.densities;
    const bool implant = has_implant(spec, instance_number);
    const bool infected = spec.label == Label::Infected && implant;

    // Noise and texture come from separate streams, and both are drawn for every
    // pixel, so the two labels share every value outside the band.
    rng::Engine noise(rng::derive(spec.seed, static_cast<std::uint64_t>(instance_number)));
    rng::Engine texture(rng::derive(rng::derive(spec.seed, kBandStream), static_cast<std::uint64_t>(instance_number)));

    dicom::RawSlice slice;
    slice.meta = {spec.patient_id, instance_number, spec.image_size, spec.image_size,
                  spec.rescale_slope, spec.rescale_intercept, 16, 0};
    slice.pixels.resize(static_cast<std::size_t>(spec.image_size) * static_cast<std::size_t>(spec.image_size));

    std::size_t k = 0;
    for (int r = 0; r < spec.image_size; ++r) {
        for (int c = 0; c < spec.image_size; ++c, ++k) {
            const double jitter = 2.0 * rng::uniform01(noise) - 1.0;
            const double grain = rng::uniform01(texture);
            const double dist = radius_of(g, r, c);
            double hu = 0.0;
            if (implant && dist <= g.implant_radius) {
                hu = d.implant + jitter * d.implant_noise;
            } else if (dist <= g.bone_inner_radius) {
                hu = d.marrow + jitter * d.tissue_noise;
            } else if (dist <= g.bone_outer_radius) {
                hu = d.bone + jitter * d.bone_noise;
            } else if (dist <= g.body_radius) {
                hu = d.soft_tissue + jitter * d.tissue_noise;
                if (infected && in_band(g, r, c)) {
                    hu += g.band_amplitude_min + (g.band_amplitude_max - g.band_amplitude_min) * grain;
                }
            } else {
                hu = d.air + jitter * d.tissue_noise;
            }
            slice.pixels[k] = to_raw(hu, spec);
        }
    }
    return slice;
}

std::vector<dicom::RawSlice> generate_patient(const PhantomSpec& spec) {
    validate(spec);
    std::vector<dicom::RawSlice> slices;
    slices.reserve(static_cast<std::size_t>(spec.num_slices));
    for (int n = 1; n <= spec.num_slices; ++n) slices.push_back(generate_slice(spec, n));
    return slices;
}

std::vector<PhantomSpec> plan_cohort(const CohortOptions& options) {
    if (options.n_aseptic < 0 || options.n_infected < 0) invalid("patient counts must be >= 0");
    if (options.min_slices < 1 || options.min_slices > options.max_slices) invalid("need 1 <= min_slices <= max_slices");

    std::vector<Label> labels(static_cast<std::size_t>(options.n_aseptic), Label::Aseptic);
    labels.insert(labels.end(), static_cast<std::size_t>(options.n_infected), Label::Infected);
    rng::Engine engine(rng::derive(options.seed, "cohort"));
    rng::shuffle(labels, engine);

    std::vector<PhantomSpec> specs;
    specs.reserve(labels.size());
    for (std::size_t k = 0; k < labels.size(); ++k) {
        PhantomSpec spec;
        spec.patient_id = patient_id_for(k, labels.size());
        spec.label = labels[k];
        spec.image_size = options.image_size;
        spec.seed = rng::derive(options.seed, spec.patient_id);

        rng::Engine plan(rng::derive(spec.seed, "plan"));
        spec.num_slices = static_cast<int>(rng::between(plan, options.min_slices, options.max_slices));
        const int margin = spec.num_slices / 5;
        spec.implant_first = 1 + static_cast<int>(rng::between(plan, 0, margin));
        spec.implant_last = spec.num_slices - static_cast<int>(rng::between(plan, 0, margin));
        spec.geometry = random_geometry(spec.seed, options.image_size);
        validate(spec);
        specs.push_back(std::move(spec));
    }
    return specs;
}

cohort::CohortManifest generate_cohort(const CohortOptions& options, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    const auto specs = plan_cohort(options);

    cohort::CohortManifest manifest;
    nlohmann::json truth = nlohmann::json::array();
    struct Job {
        std::size_t patient;
        int instance;
    };
    std::vector<Job> jobs;
    try {
        fs::create_directories(out_dir);
        for (std::size_t p = 0; p < specs.size(); ++p) {
            const auto& spec = specs[p];
            fs::create_directories(out_dir / spec.patient_id);
            cohort::PatientRecord record{spec.patient_id, spec.label, {}};
            for (int n = 1; n <= spec.num_slices; ++n) {
                record.slices.push_back(spec.patient_id + "/" + std::to_string(n) + ".dcm");
                jobs.push_back({p, n});
            }
            manifest.patients.push_back(std::move(record));
            truth.push_back({{"id", spec.patient_id},
                             {"label", std::string(to_string(spec.label))},
                             {"num_slices", spec.num_slices},
                             {"implant_first", spec.implant_first},
                             {"implant_last", spec.implant_last},
                             {"image_size", spec.image_size}});
        }
    } catch (const fs::filesystem_error& e) {
        throw Error(ErrorCode::IoFailure, e.what());
    }

    parallel_for(jobs.size(), options.jobs, [&](std::size_t j) {
        const auto& spec = specs[jobs[j].patient];
        const int n = jobs[j].instance;
        dicom::write_dicom_file(out_dir / spec.patient_id / (std::to_string(n) + ".dcm"), generate_slice(spec, n));
    });

    cohort::write_manifest(out_dir / kManifestFile, manifest);
    detail::write_text_file(out_dir / kTruthFile, nlohmann::json{{"patients", truth}}.dump(2) + "\n");
    return manifest;
}

}  // namespace ctpji::phantom
