#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ctpji/hounsfield.hpp"

namespace ctpji::contour {

struct Point {
    int row = 0;
    int col = 0;
    friend constexpr bool operator==(Point, Point) = default;
    friend constexpr auto operator<=>(Point, Point) = default;
};

/// A border of an 8-connected foreground component.
///
/// Outer borders have no parent unless they sit inside a hole, in which case
/// the parent is that hole border. Hole borders always point at the outer
/// border of the component that surrounds them.
struct Contour {
    std::vector<Point> points;
    bool closed = true;
    bool is_hole = false;
    std::optional<std::size_t> hierarchy_parent;
};

/// Topological border following (Suzuki & Abe style) over the whole mask.
/// Contours are returned in the raster order of their starting pixel; every
/// border pixel appears in at least one contour.
[[nodiscard]] std::vector<Contour> trace_contours(const hu::BinaryMask& mask);

/// Area centroid of a filled region, with the exact integer moments it came from.
struct Centroid {
    double row = 0.0;
    double col = 0.0;
    std::int64_t area = 0;     ///< m00
    std::int64_t sum_row = 0;  ///< m10
    std::int64_t sum_col = 0;  ///< m01
};

/// Pixels enclosed by an outer contour: its component plus everything inside its holes.
[[nodiscard]] Grid<std::uint8_t> filled_region(const Contour& outer, const hu::BinaryMask& mask);

/// Centroid of the filled region of the largest outer contour. Ties go to the
/// contour that starts first in raster order. Throws NoContour.
[[nodiscard]] Centroid principal_centroid(std::span<const Contour> contours, const hu::BinaryMask& mask);

}  // namespace ctpji::contour
