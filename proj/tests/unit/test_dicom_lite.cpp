#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <string>

#include "ctpji/dicom_lite.hpp"
#include "ctpji/error.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace ctpji;
using dicom::RawSlice;

namespace {

using Bytes = std::vector<std::uint8_t>;

RawSlice small_slice() {
    RawSlice s;
    s.meta = {"P001", 3, 4, 4, 1.0, -1024.0, 16, 0};
    s.pixels = {0, 1, 2, 3, 100, 200, 300, 400, 1024, 2048, 3000, 4000, 9024, 65535, 7, 8};
    return s;
}

std::optional<ErrorCode> code_of(const Bytes& bytes) {
    return testing::error_code_of([&] { return dicom::parse_dicom(bytes); });
}

/// Hand-rolled element encoder, separate from the library writer.
struct Builder {
    bool explicit_vr = true;
    Bytes out;

    void u16(std::uint16_t v) {
        out.push_back(v & 0xFF);
        out.push_back(v >> 8);
    }
    void u32(std::uint32_t v) {
        u16(v & 0xFFFF);
        u16(v >> 16);
    }
    void element(std::uint16_t g, std::uint16_t e, const char* vr, const Bytes& value) {
        u16(g);
        u16(e);
        const std::string v(vr);
        if (explicit_vr) {
            out.push_back(v[0]);
            out.push_back(v[1]);
            if (v == "OB" || v == "OW" || v == "UN" || v == "SQ" || v == "UT") {
                u16(0);
                u32(static_cast<std::uint32_t>(value.size()));
            } else {
                u16(static_cast<std::uint16_t>(value.size()));
            }
        } else {
            u32(static_cast<std::uint32_t>(value.size()));
        }
        out.insert(out.end(), value.begin(), value.end());
    }
    void text(std::uint16_t g, std::uint16_t e, const char* vr, std::string s) {
        if (s.size() % 2) s.push_back(' ');
        element(g, e, vr, Bytes(s.begin(), s.end()));
    }
    void us(std::uint16_t g, std::uint16_t e, std::uint16_t v) { element(g, e, "US", {Bytes::value_type(v & 0xFF), Bytes::value_type(v >> 8)}); }
};

/// Elements of a 2x2 signed 16-bit slice, pixel data last.
std::vector<std::function<void(Builder&)>> two_by_two_elements() {
    return {
        [](Builder& b) { b.text(0x0010, 0x0020, "LO", "ABC"); },
        [](Builder& b) { b.text(0x0020, 0x0013, "IS", "12"); },
        [](Builder& b) { b.us(0x0028, 0x0010, 2); },
        [](Builder& b) { b.us(0x0028, 0x0011, 2); },
        [](Builder& b) { b.us(0x0028, 0x0100, 16); },
        [](Builder& b) { b.us(0x0028, 0x0103, 1); },
        [](Builder& b) { b.text(0x0028, 0x1052, "DS", "-1024"); },
        [](Builder& b) { b.text(0x0028, 0x1053, "DS", "2.5"); },
    };
}

void pixel_data(Builder& b) { b.element(0x7FE0, 0x0010, "OW", {0x9C, 0xFF, 0x01, 0x00, 0x00, 0x80, 0xFF, 0x7F}); }

RawSlice expected_two_by_two() {
    RawSlice s;
    s.meta = {"ABC", 12, 2, 2, 2.5, -1024.0, 16, 1};
    s.pixels = {-100, 1, -32768, 32767};
    return s;
}

std::size_t find_pixel_data(const Bytes& bytes) {
    const Bytes tag = {0xE0, 0x7F, 0x10, 0x00};
    const auto it = std::search(bytes.begin(), bytes.end(), tag.begin(), tag.end());
    REQUIRE(it != bytes.end());
    return static_cast<std::size_t>(it - bytes.begin());
}

}  // namespace

TEST_CASE("round trip of a small slice with slope 1 and intercept -1024") {
    const auto s = small_slice();
    CHECK(dicom::parse_dicom(dicom::write_dicom_lite(s)) == s);
}

TEST_CASE("1x1 slice with a zero pixel round-trips") {
    RawSlice s;
    s.meta = {"X", 1, 1, 1, 1.0, 0.0, 8, 0};
    s.pixels = {0};
    CHECK(dicom::parse_dicom(dicom::write_dicom_lite(s)) == s);
}

TEST_CASE("512x512 random 16-bit slices round-trip") {
    std::mt19937_64 gen(42);
    for (const int representation : {0, 1}) {
        RawSlice s;
        s.meta = {"BIG", 77, 512, 512, 0.5, -1000.0, 16, representation};
        std::uniform_int_distribution<int> px(representation ? -32768 : 0, representation ? 32767 : 65535);
        s.pixels.resize(512 * 512);
        for (auto& p : s.pixels) p = px(gen);
        CHECK(dicom::parse_dicom(dicom::write_dicom_lite(s)) == s);
    }
}

TEST_CASE("randomized round-trip property") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = testing::random_raw_slice(gen, 40);
        REQUIRE(dicom::parse_dicom(dicom::write_dicom_lite(s)) == s);
    }
}

TEST_CASE("writer rejects malformed slices") {
    auto write = [](const RawSlice& s) { return [&s] { return dicom::write_dicom_lite(s); }; };

    auto short_pixels = small_slice();
    short_pixels.pixels.pop_back();
    CHECK(testing::error_code_of(write(short_pixels)) == ErrorCode::InvariantViolation);

    auto out_of_range = small_slice();
    out_of_range.meta.bits_allocated = 8;
    CHECK(testing::error_code_of(write(out_of_range)) == ErrorCode::InvariantViolation);

    auto long_ds = small_slice();
    long_ds.meta.rescale_slope = 0.1 + 0.2;  // 0.30000000000000004
    CHECK(testing::error_code_of(write(long_ds)) == ErrorCode::InvariantViolation);

    auto bad_id = small_slice();
    bad_id.meta.patient_id = "a\\b";
    CHECK(testing::error_code_of(write(bad_id)) == ErrorCode::InvariantViolation);

    auto zero_rows = small_slice();
    zero_rows.meta.rows = 0;
    zero_rows.pixels.clear();
    CHECK(testing::error_code_of(write(zero_rows)) == ErrorCode::InvariantViolation);
}

TEST_CASE("missing pixel data") {
    auto bytes = dicom::write_dicom_lite(small_slice());
    bytes.resize(find_pixel_data(bytes));
    CHECK(code_of(bytes) == ErrorCode::MissingPixelData);
}

TEST_CASE("16-bit two's complement pixel 0xFF9C decodes to -100") {
    Builder b;
    for (const auto& add : two_by_two_elements()) add(b);
    pixel_data(b);
    const auto s = dicom::parse_dicom(b.out);
    CHECK(s == expected_two_by_two());
    CHECK(s.pixels[0] == -100);
}

TEST_CASE("implicit VR little endian without preamble") {
    Builder b;
    b.explicit_vr = false;
    for (const auto& add : two_by_two_elements()) add(b);
    pixel_data(b);
    CHECK(dicom::parse_dicom(b.out) == expected_two_by_two());
}

TEST_CASE("implicit VR declared by the file meta group") {
    Builder meta;
    meta.text(0x0002, 0x0010, "UI", "1.2.840.10008.1.2");
    Builder body;
    body.explicit_vr = false;
    for (const auto& add : two_by_two_elements()) add(body);
    pixel_data(body);
    Bytes file(128, 0);
    file.insert(file.end(), {'D', 'I', 'C', 'M'});
    file.insert(file.end(), meta.out.begin(), meta.out.end());
    file.insert(file.end(), body.out.begin(), body.out.end());
    CHECK(dicom::parse_dicom(file) == expected_two_by_two());
}

TEST_CASE("files without preamble or without meta group still parse") {
    const auto s = small_slice();
    const auto full = dicom::write_dicom_lite(s);
    const Bytes no_preamble(full.begin() + 132, full.end());
    CHECK(dicom::parse_dicom(no_preamble) == s);

    // Skip the whole 0002 group: its length lives in (0002,0000).
    const std::uint32_t group_length = full[140] | (full[141] << 8) | (full[142] << 16) | (full[143] << 24);
    const Bytes dataset_only(full.begin() + 144 + group_length, full.end());
    CHECK(dicom::parse_dicom(dataset_only) == s);
}

TEST_CASE("element order inside the dataset does not matter") {
    auto elements = two_by_two_elements();
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::shuffle(elements.begin(), elements.end(), gen);
        Builder b;
        for (const auto& add : elements) add(b);
        pixel_data(b);
        REQUIRE(dicom::parse_dicom(b.out) == expected_two_by_two());
    }
}

TEST_CASE("pixel data must be the last element") {
    Builder b;
    for (const auto& add : two_by_two_elements()) add(b);
    pixel_data(b);
    b.text(0x0030, 0x0001, "LO", "late");
    CHECK(code_of(b.out) == ErrorCode::PixelDataNotLast);
}

TEST_CASE("unknown elements are skipped by their declared length") {
    Builder b;
    b.text(0x0009, 0x0010, "LO", "PRIVATE CREATOR");
    b.element(0x0009, 0x1001, "OB", Bytes(301, 0xAB));
    b.element(0x0019, 0x1002, "UN", Bytes(8, 0x00));
    for (const auto& add : two_by_two_elements()) add(b);
    b.text(0x0040, 0x0001, "SH", "x");
    pixel_data(b);
    CHECK(dicom::parse_dicom(b.out) == expected_two_by_two());
}

TEST_CASE("missing rescale tags default to slope 1 and intercept 0") {
    Builder b;
    auto elements = two_by_two_elements();
    elements.resize(6);
    for (const auto& add : elements) add(b);
    pixel_data(b);
    const auto s = dicom::parse_dicom(b.out);
    CHECK(s.meta.rescale_slope == 1.0);
    CHECK(s.meta.rescale_intercept == 0.0);
}

TEST_CASE("unsupported transfer syntaxes") {
    for (const char* uid : {"1.2.840.10008.1.2.2", "1.2.840.10008.1.2.4.50", "1.2.840.10008.1.2.1.99"}) {
        Builder meta;
        meta.text(0x0002, 0x0010, "UI", uid);
        Builder body;
        for (const auto& add : two_by_two_elements()) add(body);
        pixel_data(body);
        Bytes file = meta.out;
        file.insert(file.end(), body.out.begin(), body.out.end());
        CHECK(code_of(file) == ErrorCode::UnsupportedTransferSyntax);
    }
}

TEST_CASE("encapsulated pixel data is rejected") {
    Builder b;
    for (const auto& add : two_by_two_elements()) add(b);
    b.u16(0x7FE0);
    b.u16(0x0010);
    b.out.insert(b.out.end(), {'O', 'B', 0, 0});
    b.u32(0xFFFFFFFF);
    CHECK(code_of(b.out) == ErrorCode::UnsupportedTransferSyntax);
}

TEST_CASE("truncation and shape errors") {
    const auto full = dicom::write_dicom_lite(small_slice());
    const Bytes cut(full.begin(), full.end() - 3);
    CHECK(code_of(cut) == ErrorCode::TruncatedElement);

    Builder b;
    auto elements = two_by_two_elements();
    elements[2] = [](Builder& x) { x.us(0x0028, 0x0010, 3); };  // 3 rows, but 2x2 pixel payload
    for (const auto& add : elements) add(b);
    pixel_data(b);
    CHECK(code_of(b.out) == ErrorCode::ShapeMismatch);
}

TEST_CASE("multi-frame and odd bit depths are rejected") {
    Builder b;
    b.text(0x0028, 0x0008, "IS", "4");
    for (const auto& add : two_by_two_elements()) add(b);
    pixel_data(b);
    CHECK(code_of(b.out) == ErrorCode::UnsupportedFormat);

    Builder c;
    auto elements = two_by_two_elements();
    elements[4] = [](Builder& x) { x.us(0x0028, 0x0100, 32); };
    for (const auto& add : elements) add(c);
    pixel_data(c);
    CHECK(code_of(c.out) == ErrorCode::UnsupportedFormat);
}

TEST_CASE("duplicated required tags are rejected") {
    Builder b;
    for (const auto& add : two_by_two_elements()) add(b);
    b.us(0x0028, 0x0010, 2);
    pixel_data(b);
    CHECK(code_of(b.out) == ErrorCode::DuplicateElement);
}

TEST_CASE("8-bit slices with an odd pixel count carry one pad byte") {
    RawSlice s;
    s.meta = {"ODD", 1, 3, 3, 1.0, 0.0, 8, 1};
    s.pixels = {-128, -1, 0, 1, 2, 3, 4, 5, 127};
    const auto bytes = dicom::write_dicom_lite(s);
    CHECK(bytes.size() % 2 == 0);
    CHECK(dicom::parse_dicom(bytes) == s);
}

TEST_CASE("any byte mutation parses to a valid slice or raises a declared error") {
    std::mt19937_64 gen(11);
    const auto base = dicom::write_dicom_lite(small_slice());
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> kind(0, 3);
    int parsed = 0, rejected = 0;
    for (int trial = 0; trial < 20000; ++trial) {
        Bytes m = base;
        const int edits = 1 + trial % 4;
        for (int e = 0; e < edits; ++e) {
            std::uniform_int_distribution<std::size_t> pos(0, m.size() - 1);
            switch (kind(gen)) {
                case 0: m[pos(gen)] = static_cast<std::uint8_t>(byte(gen)); break;
                case 1: m.resize(pos(gen)); break;
                case 2: m.insert(m.begin() + static_cast<std::ptrdiff_t>(pos(gen)), static_cast<std::uint8_t>(byte(gen))); break;
                default: m.erase(m.begin() + static_cast<std::ptrdiff_t>(pos(gen))); break;
            }
            if (m.empty()) m.push_back(0);
        }
        try {
            const auto s = dicom::parse_dicom(m);
            REQUIRE(s.pixels.size() == static_cast<std::size_t>(s.meta.rows) * static_cast<std::size_t>(s.meta.cols));
            dicom::validate(s);
            ++parsed;
        } catch (const Error&) {
            ++rejected;
        }
    }
    CHECK(parsed > 0);
    CHECK(rejected > 0);
}
