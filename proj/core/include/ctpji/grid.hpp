#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace ctpji {

/// Dense row-major 2-D grid.
template <typename T>
struct Grid {
    int rows = 0;
    int cols = 0;
    std::vector<T> data;

    Grid() = default;
    Grid(int r, int c, T fill = T{})
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

    [[nodiscard]] std::size_t size() const noexcept { return data.size(); }
    [[nodiscard]] bool empty() const noexcept { return data.empty(); }

    [[nodiscard]] bool contains(int r, int c) const noexcept {
        return r >= 0 && c >= 0 && r < rows && c < cols;
    }

    [[nodiscard]] T& operator()(int r, int c) noexcept {
        assert(contains(r, c));
        return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                    static_cast<std::size_t>(c)];
    }
    [[nodiscard]] const T& operator()(int r, int c) const noexcept {
        assert(contains(r, c));
        return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                    static_cast<std::size_t>(c)];
    }

    friend bool operator==(const Grid&, const Grid&) = default;
};

}  // namespace ctpji
