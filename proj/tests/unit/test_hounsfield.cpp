#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "ctpji/hounsfield.hpp"
#include "ctpji/phantom.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace ctpji;

namespace {

hu::HuSlice uniform_slice(float value, int rows = 8, int cols = 8, std::int32_t instance = 1) {
    hu::HuSlice s;
    s.meta = {"P", instance, rows, cols, 1.0, 0.0, 16, 1};
    s.hu = Grid<float>(rows, cols, value);
    return s;
}

dicom::RawSlice one_pixel(std::int32_t p, double slope, double intercept) {
    dicom::RawSlice s;
    s.meta = {"P", 1, 1, 1, slope, intercept, 16, 1};
    s.pixels = {p};
    return s;
}

phantom::PhantomSpec small_phantom(Label label = Label::Aseptic) {
    phantom::PhantomSpec spec;
    spec.patient_id = "PH1";
    spec.label = label;
    spec.num_slices = 10;
    spec.implant_first = 3;
    spec.implant_last = 8;
    spec.image_size = 128;
    spec.seed = 99;
    spec.geometry = phantom::random_geometry(spec.seed, spec.image_size);
    return spec;
}

}  // namespace

TEST_CASE("to_hounsfield applies slope and intercept") {
    CHECK(hu::to_hounsfield(one_pixel(0, 1.0, -1024.0)).hu.data[0] == -1024.0f);
    CHECK(hu::to_hounsfield(one_pixel(2048, 0.5, 0.0)).hu.data[0] == 1024.0f);
}

TEST_CASE("to_hounsfield matches a scalar loop bit for bit") {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 20; ++trial) {
        auto raw = testing::random_raw_slice(gen, 64);
        raw.meta.rescale_slope = std::uniform_real_distribution<double>(0.01, 3.0)(gen);
        raw.meta.rescale_intercept = std::uniform_real_distribution<double>(-3000.0, 3000.0)(gen);
        const auto hu = hu::to_hounsfield(raw);
        const auto expected = testing::scalar_hounsfield(raw);
        REQUIRE(hu.hu.rows == raw.meta.rows);
        REQUIRE(hu.hu.cols == raw.meta.cols);
        CHECK(std::memcmp(hu.hu.data.data(), expected.data(), expected.size() * sizeof(float)) == 0);
    }
}

TEST_CASE("changing the intercept shifts every pixel by the same amount") {
    std::mt19937_64 gen(2);
    auto raw = testing::random_raw_slice(gen, 32);
    raw.meta.rescale_intercept = -1024.0;
    const auto a = hu::to_hounsfield(raw);
    raw.meta.rescale_intercept = 976.0;
    const auto b = hu::to_hounsfield(raw);
    for (std::size_t k = 0; k < a.hu.size(); ++k) {
        CHECK(static_cast<double>(b.hu.data[k]) - a.hu.data[k] == doctest::Approx(2000.0).epsilon(1e-6));
    }
}

TEST_CASE("contains_prosthesis uses a strict inequality") {
    CHECK_FALSE(hu::contains_prosthesis(uniform_slice(0.0f)));
    auto s = uniform_slice(0.0f);
    s.hu(3, 4) = 3000.0f;
    CHECK_FALSE(hu::contains_prosthesis(s));
    s.hu(3, 4) = 3001.0f;
    CHECK(hu::contains_prosthesis(s));
}

TEST_CASE("bone_mask thresholds strictly") {
    const auto below = hu::bone_mask(uniform_slice(999.0f));
    CHECK(std::all_of(below.bits.data.begin(), below.bits.data.end(), [](auto v) { return v == 0; }));
    const auto above = hu::bone_mask(uniform_slice(1001.0f));
    CHECK(std::all_of(above.bits.data.begin(), above.bits.data.end(), [](auto v) { return v == 1; }));
    CHECK(above.threshold_hu == 1000.0);
}

TEST_CASE("raising a threshold never adds pixels or slices") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<float> v(-1000.0f, 9000.0f);
    std::vector<hu::HuSlice> series;
    for (int n = 1; n <= 12; ++n) {
        auto s = uniform_slice(0.0f, 16, 16, n);
        for (auto& x : s.hu.data) x = v(gen) * (n % 3 == 0 ? 0.2f : 1.0f);
        series.push_back(std::move(s));
    }
    for (const auto& s : series) {
        for (double t = -500.0; t < 9000.0; t += 750.0) {
            const auto lo = hu::bone_mask(s, t);
            const auto hi = hu::bone_mask(s, t + 250.0);
            for (std::size_t k = 0; k < lo.bits.size(); ++k) CHECK(hi.bits.data[k] <= lo.bits.data[k]);
        }
    }
    std::size_t previous = series.size() + 1;
    for (double t = 0.0; t < 9500.0; t += 500.0) {
        std::size_t count = 0;
        try {
            count = hu::select_series(series, t).size();
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::EmptySelection);
        }
        CHECK(count <= previous);
        previous = count;
    }
}

TEST_CASE("select_series keeps the implant slices in instance order") {
    const auto spec = small_phantom();
    std::vector<hu::HuSlice> series;
    for (const auto& raw : phantom::generate_patient(spec)) series.push_back(hu::to_hounsfield(raw));
    std::mt19937_64 gen(9);
    std::shuffle(series.begin(), series.end(), gen);

    const auto picked = hu::select_series(series);
    REQUIRE(picked.size() == 6);
    for (std::size_t k = 0; k < picked.size(); ++k) CHECK(picked[k].meta.instance_number == static_cast<int>(k) + 3);

    std::shuffle(series.begin(), series.end(), gen);
    const auto again = hu::select_series(series);
    REQUIRE(again.size() == picked.size());
    for (std::size_t k = 0; k < picked.size(); ++k) CHECK(again[k].hu == picked[k].hu);
}

TEST_CASE("select_series errors") {
    std::vector<hu::HuSlice> none = {uniform_slice(0.0f, 4, 4, 1), uniform_slice(10.0f, 4, 4, 2)};
    CHECK(testing::error_code_of([&] { return hu::select_series(none); }) == ErrorCode::EmptySelection);
    CHECK(testing::error_code_of([&] { return hu::select_series({}); }) == ErrorCode::EmptySelection);

    std::vector<hu::HuSlice> dup = {uniform_slice(5000.0f, 4, 4, 1), uniform_slice(5000.0f, 4, 4, 1)};
    CHECK(testing::error_code_of([&] { return hu::select_series(dup); }) == ErrorCode::DuplicateInstance);

    std::vector<hu::HuSlice> mixed = {uniform_slice(5000.0f, 4, 4, 1), uniform_slice(5000.0f, 4, 4, 2)};
    mixed[1].meta.patient_id = "Q";
    CHECK(testing::error_code_of([&] { return hu::select_series(mixed); }) == ErrorCode::PatientMismatch);
}

TEST_CASE("phantom slices: implant detection and bone annulus mask") {
    const auto spec = small_phantom();
    const auto& g = spec.geometry;
    for (int n = 1; n <= spec.num_slices; ++n) {
        const auto slice = hu::to_hounsfield(phantom::generate_slice(spec, n));
        CHECK(hu::contains_prosthesis(slice) == (n >= 3 && n <= 8));
        if (n >= 3 && n <= 8) continue;

        // Geometry oracle: annulus between the inner and outer bone radii.
        const auto mask = hu::bone_mask(slice);
        int mismatches = 0;
        for (int r = 0; r < mask.rows(); ++r) {
            for (int c = 0; c < mask.cols(); ++c) {
                const double d = std::sqrt((r - g.center_row) * (r - g.center_row) + (c - g.center_col) * (c - g.center_col));
                const bool annulus = d > g.bone_inner_radius && d <= g.bone_outer_radius;
                mismatches += annulus != mask.at(r, c);
            }
        }
        CHECK(mismatches == 0);
    }
}
