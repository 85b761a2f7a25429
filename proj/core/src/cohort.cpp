#include "ctpji/cohort.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "ctpji/error.hpp"
#include "ctpji/random.hpp"
#include "io_util.hpp"

namespace ctpji::cohort {

using nlohmann::json;

namespace {

constexpr std::size_t kPerLabel = kBalancedSetSize / 2;
constexpr std::size_t kBalancedSets = 1 + kValidationBlocks;

Label label_from_json(const json& value, ErrorCode code) {
    if (!value.is_string()) throw Error(code, "label must be a string");
    const auto label = parse_label(value.get<std::string>());
    if (!label) throw Error(code, "unknown label '" + value.get<std::string>() + "'");
    return *label;
}

std::vector<std::string> id_list(const json& value, const char* key) {
    if (!value.is_array()) throw Error(ErrorCode::InvalidSplits, std::string(key) + " must be an array");
    std::vector<std::string> out;
    for (const auto& v : value) {
        if (!v.is_string()) throw Error(ErrorCode::InvalidSplits, std::string(key) + " holds a non-string id");
        out.push_back(v.get<std::string>());
    }
    return out;
}

void require(bool condition, const std::string& what) {
    if (!condition) throw Error(ErrorCode::InvalidSplits, what);
}

}  // namespace

void validate(const CohortManifest& manifest) {
    std::set<std::string> ids;
    for (const auto& p : manifest.patients) {
        if (p.id.empty()) throw Error(ErrorCode::InvalidManifest, "empty patient id");
        if (!ids.insert(p.id).second) throw Error(ErrorCode::InvalidManifest, "duplicate patient id " + p.id);
    }
}

std::string to_json(const CohortManifest& manifest) {
    json patients = json::array();
    for (const auto& p : manifest.patients) {
        patients.push_back({{"id", p.id}, {"label", std::string(to_string(p.label))}, {"slices", p.slices}});
    }
    return json{{"patients", patients}}.dump(2) + "\n";
}

CohortManifest manifest_from_json(std::string_view text) {
    CohortManifest manifest;
    try {
        const json doc = json::parse(text);
        for (const auto& p : doc.at("patients")) {
            PatientRecord record;
            record.id = p.at("id").get<std::string>();
            record.label = label_from_json(p.at("label"), ErrorCode::InvalidManifest);
            if (p.contains("slices")) record.slices = p.at("slices").get<std::vector<std::string>>();
            manifest.patients.push_back(std::move(record));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidManifest, e.what());
    }
    validate(manifest);
    return manifest;
}

CohortManifest read_manifest(const std::filesystem::path& path) {
    try {
        return manifest_from_json(detail::read_text_file(path));
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.message());
    }
}

void write_manifest(const std::filesystem::path& path, const CohortManifest& manifest) {
    validate(manifest);
    detail::write_text_file(path, to_json(manifest));
}

Splits make_splits(const CohortManifest& manifest, std::uint64_t seed) {
    validate(manifest);
    std::vector<std::string> aseptic, infected;
    Splits splits;
    splits.seed = seed;
    for (const auto& p : manifest.patients) {
        (p.label == Label::Infected ? infected : aseptic).push_back(p.id);
        splits.labels[p.id] = p.label;
    }
    const std::size_t needed = kPerLabel * kBalancedSets;
    if (aseptic.size() < needed || infected.size() < needed) {
        throw Error(ErrorCode::InsufficientCohort,
                    "need " + std::to_string(needed) + " patients per label, have " + std::to_string(aseptic.size()) +
                        " aseptic and " + std::to_string(infected.size()) + " infected");
    }

    // Sorting first makes the result independent of manifest order.
    std::sort(aseptic.begin(), aseptic.end());
    std::sort(infected.begin(), infected.end());
    rng::Engine engine(rng::derive(seed, "splits"));
    rng::shuffle(aseptic, engine);
    rng::shuffle(infected, engine);

    auto take_balanced = [&](std::size_t block) {
        std::vector<std::string> set;
        for (std::size_t k = 0; k < kPerLabel; ++k) {
            set.push_back(aseptic[block * kPerLabel + k]);
            set.push_back(infected[block * kPerLabel + k]);
        }
        std::sort(set.begin(), set.end());
        return set;
    };
    splits.d_x = take_balanced(0);
    for (std::size_t v = 0; v < kValidationBlocks; ++v) splits.d_v[v] = take_balanced(v + 1);
    splits.d_t.assign(aseptic.begin() + static_cast<std::ptrdiff_t>(needed), aseptic.end());
    splits.d_t.insert(splits.d_t.end(), infected.begin() + static_cast<std::ptrdiff_t>(needed), infected.end());
    std::sort(splits.d_t.begin(), splits.d_t.end());
    return splits;
}

void validate(const Splits& splits) {
    std::set<std::string> seen;
    auto check_set = [&](const std::vector<std::string>& ids, const std::string& name, bool balanced) {
        std::size_t infected = 0;
        for (const auto& id : ids) {
            require(seen.insert(id).second, "patient " + id + " appears in more than one set");
            if (!splits.labels.empty()) {
                const auto it = splits.labels.find(id);
                require(it != splits.labels.end(), "no label for patient " + id);
                infected += it->second == Label::Infected;
            }
        }
        if (balanced) {
            require(ids.size() == kBalancedSetSize, name + " must hold " + std::to_string(kBalancedSetSize) + " patients");
            require(splits.labels.empty() || infected == kPerLabel, name + " is not label-balanced");
        }
    };
    check_set(splits.d_x, "d_x", true);
    for (std::size_t v = 0; v < kValidationBlocks; ++v) check_set(splits.d_v[v], "d_v" + std::to_string(v + 1), true);
    check_set(splits.d_t, "d_t", false);
    if (!splits.labels.empty()) require(seen.size() == splits.labels.size(), "labelled patients missing from splits");
}

void validate(const Splits& splits, const CohortManifest& manifest) {
    validate(splits);
    std::size_t total = splits.d_x.size() + splits.d_t.size();
    for (const auto& block : splits.d_v) total += block.size();
    require(total == manifest.patients.size(), "splits do not cover the cohort");
    std::set<std::string> ids;
    for (const auto& set : {&splits.d_x, &splits.d_t}) ids.insert(set->begin(), set->end());
    for (const auto& block : splits.d_v) ids.insert(block.begin(), block.end());
    for (const auto& p : manifest.patients) require(ids.count(p.id) == 1, "patient " + p.id + " not assigned");
}

Fold config(const Splits& splits, int k) {
    if (k < 1 || k > static_cast<int>(kValidationBlocks)) {
        throw Error(ErrorCode::BadConfigIndex, "configuration must be 1..4, got " + std::to_string(k));
    }
    Fold fold;
    fold.train = splits.d_t;
    for (std::size_t v = 0; v < kValidationBlocks; ++v) {
        if (static_cast<int>(v) + 1 == k) {
            fold.valid = splits.d_v[v];
        } else {
            fold.train.insert(fold.train.end(), splits.d_v[v].begin(), splits.d_v[v].end());
        }
    }
    std::sort(fold.train.begin(), fold.train.end());
    return fold;
}

std::string to_json(const Splits& splits) {
    json d_v = json::array();
    for (const auto& block : splits.d_v) d_v.push_back(block);
    json labels = json::object();
    for (const auto& [id, label] : splits.labels) labels[id] = std::string(to_string(label));
    json doc = {{"d_x", splits.d_x}, {"d_v", d_v}, {"d_t", splits.d_t}, {"seed", splits.seed}, {"labels", labels}};
    return doc.dump(2) + "\n";
}

Splits splits_from_json(std::string_view text) {
    Splits splits;
    try {
        const json doc = json::parse(text);
        splits.d_x = id_list(doc.at("d_x"), "d_x");
        const auto& d_v = doc.at("d_v");
        require(d_v.is_array() && d_v.size() == kValidationBlocks, "d_v must hold four blocks");
        for (std::size_t v = 0; v < kValidationBlocks; ++v) splits.d_v[v] = id_list(d_v[v], "d_v");
        splits.d_t = id_list(doc.at("d_t"), "d_t");
        splits.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("labels")) {
            for (const auto& [id, label] : doc.at("labels").items()) {
                splits.labels[id] = label_from_json(label, ErrorCode::InvalidSplits);
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidSplits, e.what());
    }
    validate(splits);
    return splits;
}

Splits read_splits(const std::filesystem::path& path) {
    try {
        return splits_from_json(detail::read_text_file(path));
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.message());
    }
}

void write_splits(const std::filesystem::path& path, const Splits& splits) {
    validate(splits);
    detail::write_text_file(path, to_json(splits));
}

}  // namespace ctpji::cohort
