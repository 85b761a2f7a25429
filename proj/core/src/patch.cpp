#include "ctpji/patch.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ctpji/error.hpp"

namespace ctpji::patch {

contour::Point snap(Center center) noexcept {
    return {static_cast<int>(std::floor(center.row + 0.5)), static_cast<int>(std::floor(center.col + 0.5))};
}

Grid<float> extract_patch(const hu::HuSlice& slice, Center center, int size) {
    if (size < 1) throw Error(ErrorCode::InvalidSpec, "patch size must be >= 1");
    if (!std::isfinite(center.row) || !std::isfinite(center.col)) {
        throw Error(ErrorCode::CenterOutOfBounds, "non-finite center");
    }
    const auto c = snap(center);
    if (!slice.hu.contains(c.row, c.col)) {
        throw Error(ErrorCode::CenterOutOfBounds,
                    "center (" + std::to_string(c.row) + "," + std::to_string(c.col) + ") outside the slice");
    }

    const float fill = *std::min_element(slice.hu.data.begin(), slice.hu.data.end());
    Grid<float> window(size, size, fill);
    const int top = c.row - size / 2;
    const int left = c.col - size / 2;
    const int r_begin = std::max(0, -top);
    const int r_end = std::min(size, slice.hu.rows - top);
    const int c_begin = std::max(0, -left);
    const int c_end = std::min(size, slice.hu.cols - left);
    for (int r = r_begin; r < r_end; ++r) {
        const float* src = &slice.hu(top + r, left + c_begin);
        std::copy(src, src + (c_end - c_begin), &window(r, c_begin));
    }
    return window;
}

Grid<float> equalize_hist(const Grid<float>& window, int bins) {
    if (bins < 1) throw Error(ErrorCode::InvalidSpec, "bin count must be >= 1");
    Grid<float> out(window.rows, window.cols, 0.0f);
    if (window.empty()) return out;

    const auto [mn, mx] = std::minmax_element(window.data.begin(), window.data.end());
    const double lo = *mn;
    const double span = static_cast<double>(*mx) - lo;
    if (!(span > 0.0)) return out;

    const double scale = static_cast<double>(bins) / span;
    std::vector<int> bin_of(window.size());
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    for (std::size_t k = 0; k < window.size(); ++k) {
        const int b = std::min(bins - 1, static_cast<int>((static_cast<double>(window.data[k]) - lo) * scale));
        bin_of[k] = b;
        ++counts[static_cast<std::size_t>(b)];
    }

    std::vector<float> cdf(static_cast<std::size_t>(bins));
    const double n = static_cast<double>(window.size());
    std::size_t running = 0;
    for (std::size_t b = 0; b < counts.size(); ++b) {
        running += counts[b];
        cdf[b] = static_cast<float>(static_cast<double>(running) / n);
    }
    for (std::size_t k = 0; k < window.size(); ++k) out.data[k] = cdf[static_cast<std::size_t>(bin_of[k])];
    return out;
}

Patch make_patch(const hu::HuSlice& slice, const PatchParams& params) {
    const auto mask = hu::bone_mask(slice, params.bone_threshold_hu);
    const auto contours = contour::trace_contours(mask);
    const auto centroid = contour::principal_centroid(contours, mask);
    const Center center{centroid.row, centroid.col};
    return Patch{equalize_hist(extract_patch(slice, center, params.size), params.bins), slice.meta.patient_id,
                 slice.meta.instance_number, center};
}

std::string patch_filename(const std::string& patient_id, std::int32_t instance_number) {
    return patient_id + "_" + std::to_string(instance_number) + ".pgm";
}

std::string encode_pgm(const Grid<float>& pixels) {
    std::string out = "P5\n" + std::to_string(pixels.cols) + " " + std::to_string(pixels.rows) + "\n65535\n";
    const std::size_t header = out.size();
    out.resize(header + 2 * pixels.size());
    for (std::size_t k = 0; k < pixels.size(); ++k) {
        const double v = std::clamp(static_cast<double>(pixels.data[k]), 0.0, 1.0);
        const auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
        out[header + 2 * k] = static_cast<char>(q >> 8);
        out[header + 2 * k + 1] = static_cast<char>(q & 0xFF);
    }
    return out;
}

Grid<float> decode_pgm(std::string_view bytes) {
    // Header: magic, width, height, maxval separated by whitespace, then one
    // whitespace byte. Comments are not produced by encode_pgm and not accepted.
    std::size_t pos = 0;
    auto next_token = [&]() -> std::string_view {
        while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        const std::size_t start = pos;
        while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        return bytes.substr(start, pos - start);
    };
    auto to_int = [](std::string_view s) {
        int v = 0;
        if (s.empty() || s.size() > 9) return -1;
        for (const char ch : s) {
            if (ch < '0' || ch > '9') return -1;
            v = v * 10 + (ch - '0');
        }
        return v;
    };
    if (next_token() != "P5") throw Error(ErrorCode::MalformedValue, "not a binary PGM");
    const int width = to_int(next_token());
    const int height = to_int(next_token());
    const int maxval = to_int(next_token());
    if (width <= 0 || height <= 0 || maxval != 65535) {
        throw Error(ErrorCode::MalformedValue, "unsupported PGM header");
    }
    ++pos;
    Grid<float> out(height, width);
    if (bytes.size() < pos + 2 * out.size()) throw Error(ErrorCode::TruncatedElement, "PGM raster truncated");
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto hi = static_cast<unsigned char>(bytes[pos + 2 * k]);
        const auto lo = static_cast<unsigned char>(bytes[pos + 2 * k + 1]);
        out.data[k] = static_cast<float>(((hi << 8) | lo) / 65535.0);
    }
    return out;
}

void write_pgm(const std::filesystem::path& path, const Grid<float>& pixels) {
    const auto bytes = encode_pgm(pixels);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

Grid<float> read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return decode_pgm(buffer.str());
}

}  // namespace ctpji::patch
