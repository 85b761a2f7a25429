#include "ctpji/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ctpji/error.hpp"
#include "io_util.hpp"

namespace ctpji::metrics {

namespace {

constexpr std::string_view kCsvHeader = "patient_id,instance_number,prob_infected";

void require_single_patient(std::span<const SlicePrediction> preds) {
    if (preds.empty()) throw Error(ErrorCode::EmptyPredictions, "no predictions for patient");
    for (const auto& p : preds) {
        if (p.patient_id != preds.front().patient_id) {
            throw Error(ErrorCode::PatientMismatch,
                        "predictions mix patients " + preds.front().patient_id + " and " + p.patient_id);
        }
    }
}

std::size_t count_correct(std::span<const SlicePrediction> preds, Label label) {
    return static_cast<std::size_t>(
        std::count_if(preds.begin(), preds.end(), [label](const auto& p) { return p.predicted_class() == label; }));
}

[[noreturn]] void bad_csv(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": " + what);
}

std::string_view unquote(std::string_view field) {
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') return field.substr(1, field.size() - 2);
    return field;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

double patient_accuracy(std::span<const SlicePrediction> preds, Label label) {
    require_single_patient(preds);
    return static_cast<double>(count_correct(preds, label)) / static_cast<double>(preds.size());
}

double patient_fscore(std::span<const SlicePrediction> preds, Label label) {
    const double recall = patient_accuracy(preds, label);
    if (recall == 0.0) return 0.0;
    // Every slice carries the patient's label, so nothing predicted positive is a false positive.
    constexpr double precision = 1.0;
    return 2.0 * precision * recall / (precision + recall);
}

Label aggregate_patient(std::span<const SlicePrediction> preds, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidThreshold, "threshold must lie in [0, 1]");
    }
    require_single_patient(preds);
    const double infected_share =
        static_cast<double>(count_correct(preds, Label::Infected)) / static_cast<double>(preds.size());
    return infected_share > threshold ? Label::Infected : Label::Aseptic;
}

PatientReport patient_report(std::span<const SlicePrediction> preds, Label label, double threshold) {
    PatientReport report;
    report.aggregated_class = aggregate_patient(preds, threshold);
    report.patient_id = preds.front().patient_id;
    report.label = label;
    report.n_images = preds.size();
    report.n_correct = count_correct(preds, label);
    report.accuracy = patient_accuracy(preds, label);
    report.f_score = patient_fscore(preds, label);
    return report;
}

Table table_report(std::span<const ConfigPredictions> runs, const cohort::Splits& splits, double threshold) {
    if (splits.d_x.empty()) throw Error(ErrorCode::MissingPredictions, "test set is empty");
    if (runs.empty()) throw Error(ErrorCode::MissingPredictions, "no configuration predictions supplied");

    std::vector<std::pair<std::string, Label>> patients;
    for (const auto& id : splits.d_x) {
        const auto it = splits.labels.find(id);
        if (it == splits.labels.end()) throw Error(ErrorCode::InvalidSplits, "no label for test patient " + id);
        patients.emplace_back(id, it->second);
    }
    std::sort(patients.begin(), patients.end(), [](const auto& a, const auto& b) {
        return std::pair(a.second, a.first) < std::pair(b.second, b.first);
    });

    Table table;
    std::set<int> seen_configs;
    for (const auto& run : runs) {
        if (!seen_configs.insert(run.config).second) {
            throw Error(ErrorCode::BadConfigIndex, "configuration " + std::to_string(run.config) + " given twice");
        }
        table.configs.push_back(run.config);
    }

    for (std::size_t n = 0; n < patients.size(); ++n) {
        TableRow row;
        row.number = static_cast<int>(n) + 1;
        row.patient_id = patients[n].first;
        row.label = patients[n].second;
        for (const auto& run : runs) {
            std::vector<SlicePrediction> mine;
            for (const auto& p : run.predictions) {
                if (p.patient_id == row.patient_id) mine.push_back(p);
            }
            if (mine.empty()) {
                throw Error(ErrorCode::MissingPredictions, "configuration " + std::to_string(run.config) +
                                                               " has no predictions for " + row.patient_id);
            }
            row.by_config[run.config] = patient_report(mine, row.label, threshold);
        }
        row.n_images = row.by_config.at(runs.front().config).n_images;
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string format_table(const Table& table) {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header = {"Patient number", "Patient id", "Patient type", "Number images"};
    for (const int k : table.configs) {
        header.push_back("C" + std::to_string(k) + " ACC/F");
        header.push_back("C" + std::to_string(k) + " aggregate");
    }
    cells.push_back(header);
    for (const auto& row : table.rows) {
        std::vector<std::string> line = {std::to_string(row.number), row.patient_id, std::string(to_string(row.label)),
                                         std::to_string(row.n_images)};
        for (const int k : table.configs) {
            const auto& r = row.by_config.at(k);
            line.push_back(fixed2(r.accuracy) + "/" + fixed2(r.f_score));
            line.push_back(std::string(to_string(r.aggregated_class)));
        }
        cells.push_back(std::move(line));
    }

    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
    }
    std::ostringstream out;
    for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            out << line[c];
            if (c + 1 < line.size()) out << std::string(width[c] - line[c].size() + 2, ' ');
        }
        out << '\n';
    }
    return out.str();
}

std::string table_to_json(const Table& table) {
    using nlohmann::json;
    json rows = json::array();
    for (const auto& row : table.rows) {
        json configs = json::object();
        for (const auto& [k, r] : row.by_config) {
            configs[std::to_string(k)] = {{"n_images", r.n_images},
                                          {"n_correct", r.n_correct},
                                          {"accuracy", r.accuracy},
                                          {"f_score", r.f_score},
                                          {"aggregated_class", std::string(to_string(r.aggregated_class))}};
        }
        rows.push_back({{"number", row.number},
                        {"patient_id", row.patient_id},
                        {"label", std::string(to_string(row.label))},
                        {"n_images", row.n_images},
                        {"configs", configs}});
    }
    return json{{"configs", table.configs}, {"rows", rows}}.dump(2) + "\n";
}

std::vector<SlicePrediction> parse_predictions_csv(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

    std::vector<SlicePrediction> out;
    std::set<std::pair<std::string, std::int32_t>> seen;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
        ++line_no;
        if (line.ends_with('\r')) line.remove_suffix(1);
        if (!header_seen) {
            if (line != kCsvHeader) bad_csv(line_no, "expected header '" + std::string(kCsvHeader) + "'");
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;

        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
            bad_csv(line_no, "expected 3 fields");
        }
        SlicePrediction p;
        p.patient_id = std::string(unquote(line.substr(0, c1)));
        if (p.patient_id.empty()) bad_csv(line_no, "empty patient_id");

        const auto inst = line.substr(c1 + 1, c2 - c1 - 1);
        const auto [ip, iec] = std::from_chars(inst.data(), inst.data() + inst.size(), p.instance_number);
        if (inst.empty() || iec != std::errc{} || ip != inst.data() + inst.size()) bad_csv(line_no, "bad instance_number");

        const auto prob = line.substr(c2 + 1);
        const auto [pp, pec] = std::from_chars(prob.data(), prob.data() + prob.size(), p.prob_infected);
        if (prob.empty() || pec != std::errc{} || pp != prob.data() + prob.size()) bad_csv(line_no, "bad prob_infected");
        if (!(p.prob_infected >= 0.0 && p.prob_infected <= 1.0)) bad_csv(line_no, "prob_infected outside [0, 1]");

        if (!seen.emplace(p.patient_id, p.instance_number).second) {
            bad_csv(line_no, "duplicate row for " + p.patient_id + " instance " + std::to_string(p.instance_number));
        }
        out.push_back(std::move(p));
    }
    if (!header_seen) bad_csv(1, "missing header");
    return out;
}

std::vector<SlicePrediction> read_predictions_csv(const std::filesystem::path& path) {
    try {
        return parse_predictions_csv(detail::read_text_file(path));
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.message());
    }
}

std::string to_csv(std::span<const SlicePrediction> preds) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& p : preds) {
        char buf[64];
        const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p.prob_infected);
        out += p.patient_id + "," + std::to_string(p.instance_number) + "," + std::string(buf, end) + "\n";
    }
    return out;
}

}  // namespace ctpji::metrics
