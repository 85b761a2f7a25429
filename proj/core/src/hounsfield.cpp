#include "ctpji/hounsfield.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_set>

#include "ctpji/error.hpp"

namespace ctpji::hu {

HuSlice to_hounsfield(const dicom::RawSlice& slice) {
    const double slope = slice.meta.rescale_slope;
    const double intercept = slice.meta.rescale_intercept;
    HuSlice out{slice.meta, Grid<float>(slice.meta.rows, slice.meta.cols)};
    std::transform(slice.pixels.begin(), slice.pixels.end(), out.hu.data.begin(), [=](std::int32_t p) {
        return static_cast<float>(static_cast<double>(p) * slope + intercept);
    });
    return out;
}

bool contains_prosthesis(const HuSlice& slice, double threshold) {
    return std::any_of(slice.hu.data.begin(), slice.hu.data.end(),
                       [threshold](float h) { return static_cast<double>(h) > threshold; });
}

BinaryMask bone_mask(const HuSlice& slice, double threshold) {
    BinaryMask mask{Grid<std::uint8_t>(slice.hu.rows, slice.hu.cols), threshold};
    std::transform(slice.hu.data.begin(), slice.hu.data.end(), mask.bits.data.begin(),
                   [threshold](float h) { return static_cast<std::uint8_t>(static_cast<double>(h) > threshold); });
    return mask;
}

std::vector<std::size_t> select_instances(std::span<const SeriesEntry> entries) {
    std::unordered_set<std::int32_t> seen;
    for (const auto& e : entries) {
        if (e.patient_id != entries.front().patient_id) {
            throw Error(ErrorCode::PatientMismatch, "series mixes patients '" +
                                                        std::string(entries.front().patient_id) + "' and '" +
                                                        std::string(e.patient_id) + "'");
        }
        if (!seen.insert(e.instance_number).second) {
            throw Error(ErrorCode::DuplicateInstance, "instance " + std::to_string(e.instance_number));
        }
    }

    std::vector<std::size_t> picked;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        if (entries[k].has_prosthesis) picked.push_back(k);
    }
    if (picked.empty()) {
        throw Error(ErrorCode::EmptySelection,
                    "no slice above the prosthesis threshold" +
                        (entries.empty() ? std::string() : " for patient '" + std::string(entries.front().patient_id) + "'"));
    }
    std::sort(picked.begin(), picked.end(), [&](std::size_t a, std::size_t b) {
        return entries[a].instance_number < entries[b].instance_number;
    });
    return picked;
}

std::vector<HuSlice> select_series(std::vector<HuSlice> slices, double threshold) {
    std::vector<SeriesEntry> entries;
    entries.reserve(slices.size());
    for (const auto& s : slices) {
        entries.push_back({s.meta.patient_id, s.meta.instance_number, contains_prosthesis(s, threshold)});
    }
    const auto picked = select_instances(entries);
    std::vector<HuSlice> out;
    out.reserve(picked.size());
    for (const auto k : picked) out.push_back(std::move(slices[k]));
    return out;
}

}  // namespace ctpji::hu
