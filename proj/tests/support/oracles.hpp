#pragma once

// Independent reference implementations used only by the tests. None of these
// call into the code paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "ctpji/dicom_lite.hpp"
#include "ctpji/grid.hpp"
#include "ctpji/hounsfield.hpp"

namespace ctpji::testing {

using Cell = std::pair<int, int>;

/// Scalar per-pixel Hounsfield conversion.
inline std::vector<float> scalar_hounsfield(const dicom::RawSlice& raw) {
    std::vector<float> out;
    out.reserve(raw.pixels.size());
    for (std::size_t k = 0; k < raw.pixels.size(); ++k) {
        const double p = raw.pixels[k];
        out.push_back(static_cast<float>(p * raw.meta.rescale_slope + raw.meta.rescale_intercept));
    }
    return out;
}

inline hu::BinaryMask make_mask(const Grid<std::uint8_t>& bits) { return hu::BinaryMask{bits, 0.0}; }

/// Foreground pixels with a 4-neighbour that is background or outside the image.
inline std::set<Cell> boundary_oracle(const Grid<std::uint8_t>& m) {
    std::set<Cell> out;
    const int dr[4] = {-1, 1, 0, 0};
    const int dc[4] = {0, 0, -1, 1};
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) {
            if (!m(r, c)) continue;
            for (int k = 0; k < 4; ++k) {
                const int rr = r + dr[k], cc = c + dc[k];
                if (rr < 0 || cc < 0 || rr >= m.rows || cc >= m.cols || !m(rr, cc)) {
                    out.insert({r, c});
                    break;
                }
            }
        }
    }
    return out;
}

struct OracleCentroid {
    double row = 0.0;
    double col = 0.0;
    std::int64_t area = 0;
};

/// Labels 8-connected components by BFS, fills each one's enclosed background
/// by flooding the exterior from a padded frame, and returns the coordinate
/// mean of the largest filled region (first in raster order on ties).
inline OracleCentroid flood_fill_centroid(const Grid<std::uint8_t>& m) {
    Grid<int> label(m.rows, m.cols, -1);
    std::vector<std::vector<Cell>> components;
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) {
            if (!m(r, c) || label(r, c) >= 0) continue;
            const int id = static_cast<int>(components.size());
            components.emplace_back();
            std::queue<Cell> q;
            q.push({r, c});
            label(r, c) = id;
            while (!q.empty()) {
                const auto [cr, cc] = q.front();
                q.pop();
                components[id].push_back({cr, cc});
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int rr = cr + dr, c2 = cc + dc;
                        if (rr < 0 || c2 < 0 || rr >= m.rows || c2 >= m.cols) continue;
                        if (m(rr, c2) && label(rr, c2) < 0) {
                            label(rr, c2) = id;
                            q.push({rr, c2});
                        }
                    }
                }
            }
        }
    }

    OracleCentroid best;
    for (int id = 0; id < static_cast<int>(components.size()); ++id) {
        // Exterior of this component on a frame padded by one pixel.
        Grid<std::uint8_t> outside(m.rows + 2, m.cols + 2, 0);
        std::queue<Cell> q;
        outside(0, 0) = 1;
        q.push({0, 0});
        while (!q.empty()) {
            const auto [r, c] = q.front();
            q.pop();
            const int dr[4] = {-1, 1, 0, 0};
            const int dc[4] = {0, 0, -1, 1};
            for (int k = 0; k < 4; ++k) {
                const int rr = r + dr[k], cc = c + dc[k];
                if (rr < 0 || cc < 0 || rr >= m.rows + 2 || cc >= m.cols + 2 || outside(rr, cc)) continue;
                const bool inside_image = rr >= 1 && cc >= 1 && rr <= m.rows && cc <= m.cols;
                if (inside_image && label(rr - 1, cc - 1) == id) continue;
                outside(rr, cc) = 1;
                q.push({rr, cc});
            }
        }
        std::int64_t area = 0;
        long double sr = 0, sc = 0;
        for (int r = 0; r < m.rows; ++r) {
            for (int c = 0; c < m.cols; ++c) {
                if (outside(r + 1, c + 1)) continue;
                ++area;
                sr += r;
                sc += c;
            }
        }
        if (area > best.area) {
            best.area = area;
            best.row = static_cast<double>(sr / area);
            best.col = static_cast<double>(sc / area);
        }
    }
    return best;
}

/// Kolmogorov-Smirnov distance between the sample's empirical CDF and U(0,1).
inline double ks_uniform(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double x = std::clamp(sample[i], 0.0, 1.0);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - x, x - static_cast<double>(i) / n});
    }
    return d;
}

// ---------------------------------------------------------------------------
// Generators

inline Grid<std::uint8_t> random_noise_mask(std::mt19937_64& gen, int rows, int cols, double density) {
    std::bernoulli_distribution on(density);
    Grid<std::uint8_t> m(rows, cols, 0);
    for (auto& v : m.data) v = on(gen);
    return m;
}

/// Union of random discs and rings, which produces holes and nesting.
inline Grid<std::uint8_t> random_blob_mask(std::mt19937_64& gen, int rows, int cols) {
    Grid<std::uint8_t> m(rows, cols, 0);
    std::uniform_int_distribution<int> shapes(1, 5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int count = shapes(gen);
    for (int s = 0; s < count; ++s) {
        const double cr = u(gen) * rows, cc = u(gen) * cols;
        const double outer = 1.0 + u(gen) * std::min(rows, cols) / 2.5;
        const double inner = u(gen) < 0.5 ? outer * u(gen) * 0.7 : -1.0;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                const double d = std::hypot(r - cr, c - cc);
                if (d <= outer && d > inner) m(r, c) = 1;
            }
        }
    }
    return m;
}

inline dicom::RawSlice random_raw_slice(std::mt19937_64& gen, int max_side) {
    std::uniform_int_distribution<int> side(1, max_side);
    std::uniform_int_distribution<int> coin(0, 1);
    dicom::RawSlice s;
    auto& m = s.meta;
    m.rows = side(gen);
    m.cols = side(gen);
    m.bits_allocated = coin(gen) ? 16 : 8;
    m.pixel_representation = coin(gen);
    m.instance_number = std::uniform_int_distribution<int>(-1000, 100000)(gen);
    m.patient_id = "PAT-" + std::to_string(std::uniform_int_distribution<int>(0, 99999)(gen));
    // Dyadic slopes and integer intercepts always fit a 16-character DS.
    m.rescale_slope = std::uniform_int_distribution<int>(1, 4096)(gen) / 1024.0;
    m.rescale_intercept = std::uniform_int_distribution<int>(-4096, 4096)(gen);
    const int bits = m.bits_allocated;
    const int lo = m.pixel_representation ? -(1 << (bits - 1)) : 0;
    const int hi = m.pixel_representation ? (1 << (bits - 1)) - 1 : (1 << bits) - 1;
    std::uniform_int_distribution<int> px(lo, hi);
    s.pixels.resize(static_cast<std::size_t>(m.rows) * static_cast<std::size_t>(m.cols));
    for (auto& p : s.pixels) p = px(gen);
    return s;
}

}  // namespace ctpji::testing
