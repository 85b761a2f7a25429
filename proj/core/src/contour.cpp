#include "ctpji/contour.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>

#include "ctpji/error.hpp"

namespace ctpji::contour {

namespace {

// Neighbour offsets in counter-clockwise order (row axis points down), starting east.
constexpr std::array<int, 8> kDr = {0, -1, -1, -1, 0, 1, 1, 1};
constexpr std::array<int, 8> kDc = {1, 1, 0, -1, -1, -1, 0, 1};

int direction_of(int dr, int dc) {
    for (int d = 0; d < 8; ++d) {
        if (kDr[d] == dr && kDc[d] == dc) return d;
    }
    return -1;
}

struct BorderInfo {
    bool is_hole = false;
    int parent = 0;  // border number, 0 = none
};

/// Follows one border starting at (r0, c0) with the background neighbour at
/// (r2, c2). Labels are written in place; points are in padded coordinates.
void follow_border(Grid<std::int32_t>& f, int r0, int c0, int r2, int c2, std::int32_t nbd,
                   std::vector<Point>& points) {
    // Clockwise search around the start for the first non-zero neighbour.
    const int d_start = direction_of(r2 - r0, c2 - c0);
    int found = -1;
    for (int k = 0; k < 8; ++k) {
        const int d = (d_start - k + 8) % 8;
        if (f(r0 + kDr[d], c0 + kDc[d]) != 0) {
            found = d;
            break;
        }
    }
    if (found < 0) {
        f(r0, c0) = -nbd;
        points.push_back({r0, c0});
        return;
    }

    const int r1 = r0 + kDr[found];
    const int c1 = c0 + kDc[found];
    int pr = r1, pc = c1;  // previous pixel (i2, j2)
    int cr = r0, cc = c0;  // current pixel (i3, j3)
    while (true) {
        // Counter-clockwise search starting just after the previous pixel.
        const int d_prev = direction_of(pr - cr, pc - cc);
        bool east_examined_zero = false;
        int nr = cr, nc = cc;
        for (int k = 1; k <= 8; ++k) {
            const int d = (d_prev + k) % 8;
            const int rr = cr + kDr[d];
            const int cc2 = cc + kDc[d];
            if (f(rr, cc2) != 0) {
                nr = rr;
                nc = cc2;
                break;
            }
            if (d == 0) east_examined_zero = true;
        }

        if (east_examined_zero) {
            f(cr, cc) = -nbd;
        } else if (f(cr, cc) == 1) {
            f(cr, cc) = nbd;
        }
        points.push_back({cr, cc});

        if (nr == r0 && nc == c0 && cr == r1 && cc == c1) break;
        pr = cr;
        pc = cc;
        cr = nr;
        cc = nc;
    }
}

struct LocalFill {
    int top = 0;
    int left = 0;
    Grid<std::uint8_t> inside;  ///< bounding-box-sized
};

/// Component of `seed` (8-connected) plus the background pockets it encloses.
LocalFill fill_outer(const Contour& outer, const hu::BinaryMask& mask) {
    int top = std::numeric_limits<int>::max(), left = top, bottom = -1, right = -1;
    for (const auto& p : outer.points) {
        top = std::min(top, p.row);
        left = std::min(left, p.col);
        bottom = std::max(bottom, p.row);
        right = std::max(right, p.col);
    }
    const int h = bottom - top + 1;
    const int w = right - left + 1;

    // Local canvas with a one-pixel margin: 1 = component, 2 = outside, 0 = unvisited.
    Grid<std::uint8_t> canvas(h + 2, w + 2, 0);
    std::vector<Point> stack;
    const Point seed = outer.points.front();
    canvas(seed.row - top + 1, seed.col - left + 1) = 1;
    stack.push_back(seed);
    while (!stack.empty()) {
        const Point p = stack.back();
        stack.pop_back();
        for (int d = 0; d < 8; ++d) {
            const int r = p.row + kDr[d];
            const int c = p.col + kDc[d];
            if (r < top || r > bottom || c < left || c > right) continue;
            auto& cell = canvas(r - top + 1, c - left + 1);
            if (cell == 0 && mask.at(r, c)) {
                cell = 1;
                stack.push_back({r, c});
            }
        }
    }

    // Flood the exterior (4-connected) from the margin.
    std::vector<Point> queue;
    for (int r = 0; r < h + 2; ++r) {
        for (int c = 0; c < w + 2; ++c) {
            if ((r == 0 || c == 0 || r == h + 1 || c == w + 1)) {
                canvas(r, c) = 2;
                queue.push_back({r, c});
            }
        }
    }
    while (!queue.empty()) {
        const Point p = queue.back();
        queue.pop_back();
        for (int d = 0; d < 8; d += 2) {
            const int r = p.row + kDr[d];
            const int c = p.col + kDc[d];
            if (!canvas.contains(r, c) || canvas(r, c) != 0) continue;
            canvas(r, c) = 2;
            queue.push_back({r, c});
        }
    }

    LocalFill out{top, left, Grid<std::uint8_t>(h, w, 0)};
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) out.inside(r, c) = canvas(r + 1, c + 1) != 2;
    }
    return out;
}

}  // namespace

std::vector<Contour> trace_contours(const hu::BinaryMask& mask) {
    const int rows = mask.rows();
    const int cols = mask.cols();
    Grid<std::int32_t> f(rows + 2, cols + 2, 0);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) f(r + 1, c + 1) = mask.at(r, c) ? 1 : 0;
    }

    // Border number 1 is the image frame, treated as a hole border.
    std::vector<BorderInfo> borders(2);
    borders[1] = {true, 0};
    std::vector<Contour> contours;
    std::int32_t nbd = 1;

    for (int i = 1; i <= rows; ++i) {
        std::int32_t lnbd = 1;
        for (int j = 1; j <= cols; ++j) {
            const std::int32_t fij = f(i, j);
            if (fij == 0) continue;

            bool start = false;
            bool hole = false;
            int r2 = i, c2 = j;
            if (fij == 1 && f(i, j - 1) == 0) {
                start = true;
                c2 = j - 1;
            } else if (fij >= 1 && f(i, j + 1) == 0) {
                start = true;
                hole = true;
                c2 = j + 1;
                if (fij > 1) lnbd = fij;
            }

            if (start) {
                ++nbd;
                const BorderInfo& prior = borders[static_cast<std::size_t>(lnbd)];
                const int parent = (hole == prior.is_hole) ? prior.parent : lnbd;
                borders.push_back({hole, parent});

                Contour contour;
                contour.is_hole = hole;
                if (parent > 1) contour.hierarchy_parent = static_cast<std::size_t>(parent - 2);
                follow_border(f, i, j, r2, c2, nbd, contour.points);
                for (auto& p : contour.points) {
                    p.row -= 1;
                    p.col -= 1;
                }
                contours.push_back(std::move(contour));
            }

            if (f(i, j) != 1) lnbd = std::abs(f(i, j));
        }
    }
    return contours;
}

Grid<std::uint8_t> filled_region(const Contour& outer, const hu::BinaryMask& mask) {
    Grid<std::uint8_t> out(mask.rows(), mask.cols(), 0);
    if (outer.points.empty()) return out;
    const LocalFill local = fill_outer(outer, mask);
    for (int r = 0; r < local.inside.rows; ++r) {
        for (int c = 0; c < local.inside.cols; ++c) out(local.top + r, local.left + c) = local.inside(r, c);
    }
    return out;
}

Centroid principal_centroid(std::span<const Contour> contours, const hu::BinaryMask& mask) {
    if (contours.empty()) throw Error(ErrorCode::NoContour, "no contour to take a centroid from");

    Centroid best;
    for (const auto& contour : contours) {
        if (contour.is_hole || contour.points.empty()) continue;

        const auto [rmin, rmax] = std::minmax_element(contour.points.begin(), contour.points.end(),
                                                      [](Point a, Point b) { return a.row < b.row; });
        const auto [cmin, cmax] = std::minmax_element(contour.points.begin(), contour.points.end(),
                                                      [](Point a, Point b) { return a.col < b.col; });
        const std::int64_t bbox = static_cast<std::int64_t>(rmax->row - rmin->row + 1) *
                                  static_cast<std::int64_t>(cmax->col - cmin->col + 1);
        if (bbox <= best.area) continue;

        const LocalFill local = fill_outer(contour, mask);
        std::int64_t area = 0, sum_r = 0, sum_c = 0;
        for (int r = 0; r < local.inside.rows; ++r) {
            for (int c = 0; c < local.inside.cols; ++c) {
                if (!local.inside(r, c)) continue;
                ++area;
                sum_r += r;
                sum_c += c;
            }
        }
        if (area <= best.area) continue;
        best.area = area;
        best.sum_row = sum_r + area * local.top;
        best.sum_col = sum_c + area * local.left;
    }
    if (best.area == 0) throw Error(ErrorCode::NoContour, "no outer contour");

    best.row = static_cast<double>(best.sum_row) / static_cast<double>(best.area);
    best.col = static_cast<double>(best.sum_col) / static_cast<double>(best.area);
    return best;
}

}  // namespace ctpji::contour
