#include "ctpji/dicom_lite.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <string_view>

#include "ctpji/error.hpp"

namespace ctpji::dicom {

namespace {

constexpr std::size_t kPreambleSize = 128;
constexpr std::string_view kMagic = "DICM";
constexpr std::string_view kImplicitVrLittleEndian = "1.2.840.10008.1.2";
constexpr std::string_view kExplicitVrLittleEndian = "1.2.840.10008.1.2.1";
constexpr std::string_view kCtImageStorage = "1.2.840.10008.5.1.4.1.1.2";
constexpr std::uint32_t kUndefinedLength = 0xFFFFFFFFu;
constexpr std::size_t kMaxDsChars = 16;

struct Tag {
    std::uint16_t group;
    std::uint16_t element;
    friend constexpr bool operator==(Tag, Tag) = default;
};

constexpr Tag kTransferSyntaxUid{0x0002, 0x0010};
constexpr Tag kPatientId{0x0010, 0x0020};
constexpr Tag kInstanceNumber{0x0020, 0x0013};
constexpr Tag kSamplesPerPixel{0x0028, 0x0002};
constexpr Tag kNumberOfFrames{0x0028, 0x0008};
constexpr Tag kRows{0x0028, 0x0010};
constexpr Tag kColumns{0x0028, 0x0011};
constexpr Tag kBitsAllocated{0x0028, 0x0100};
constexpr Tag kPixelRepresentation{0x0028, 0x0103};
constexpr Tag kRescaleIntercept{0x0028, 0x1052};
constexpr Tag kRescaleSlope{0x0028, 0x1053};
constexpr Tag kPixelData{0x7FE0, 0x0010};

constexpr std::array<std::string_view, 34> kKnownVrs = {
    "AE", "AS", "AT", "CS", "DA", "DS", "DT", "FL", "FD", "IS", "LO", "LT",
    "OB", "OD", "OF", "OL", "OV", "OW", "PN", "SH", "SL", "SQ", "SS", "ST",
    "SV", "TM", "UC", "UI", "UL", "UN", "UR", "US", "UT", "UV"};

constexpr std::array<std::string_view, 13> kLongFormVrs = {
    "OB", "OD", "OF", "OL", "OV", "OW", "SQ", "UC", "UN", "UR", "UT", "SV", "UV"};

bool is_known_vr(std::string_view vr) {
    return std::find(kKnownVrs.begin(), kKnownVrs.end(), vr) != kKnownVrs.end();
}

bool is_long_form_vr(std::string_view vr) {
    return std::find(kLongFormVrs.begin(), kLongFormVrs.end(), vr) != kLongFormVrs.end();
}

std::string describe(Tag tag) {
    std::array<char, 16> buf{};
    std::snprintf(buf.data(), buf.size(), "(%04X,%04X)", tag.group, tag.element);
    return buf.data();
}

[[noreturn]] void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

std::uint16_t load_u16(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t load_u32(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
           (static_cast<std::uint32_t>(b[at + 2]) << 16) |
           (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

struct Element {
    Tag tag;
    std::span<const std::uint8_t> value;
};

/// Sequential reader over little-endian data elements.
class ElementReader {
public:
    ElementReader(std::span<const std::uint8_t> bytes, std::size_t pos)
        : bytes_(bytes), pos_(pos) {}

    [[nodiscard]] bool done() const { return pos_ >= bytes_.size(); }

    [[nodiscard]] std::optional<Tag> peek_tag() const {
        if (bytes_.size() - pos_ < 4) return std::nullopt;
        return Tag{load_u16(bytes_, pos_), load_u16(bytes_, pos_ + 2)};
    }

    /// Heuristic used when no file meta group names the transfer syntax.
    [[nodiscard]] bool looks_explicit() const {
        if (bytes_.size() - pos_ < 6) return false;
        const std::string_view vr(reinterpret_cast<const char*>(bytes_.data() + pos_ + 4), 2);
        return is_known_vr(vr);
    }

    Element next(bool explicit_vr) {
        const std::size_t remaining = bytes_.size() - pos_;
        if (remaining < 8) fail(ErrorCode::TruncatedElement, "element header truncated");
        const Tag tag{load_u16(bytes_, pos_), load_u16(bytes_, pos_ + 2)};
        if (tag.group == 0xFFFE) {
            fail(ErrorCode::UnsupportedElement, "item delimiter outside a sequence at " + describe(tag));
        }

        std::size_t header = 8;
        std::uint32_t length = 0;
        if (explicit_vr) {
            const std::string_view vr(reinterpret_cast<const char*>(bytes_.data() + pos_ + 4), 2);
            if (!is_known_vr(vr)) fail(ErrorCode::MalformedValue, "invalid VR at " + describe(tag));
            if (is_long_form_vr(vr)) {
                if (remaining < 12) fail(ErrorCode::TruncatedElement, "element header truncated");
                length = load_u32(bytes_, pos_ + 8);
                header = 12;
            } else {
                length = load_u16(bytes_, pos_ + 6);
            }
        } else {
            length = load_u32(bytes_, pos_ + 4);
        }

        if (length == kUndefinedLength) {
            if (tag == kPixelData) {
                fail(ErrorCode::UnsupportedTransferSyntax, "encapsulated pixel data");
            }
            fail(ErrorCode::UnsupportedElement, "undefined length at " + describe(tag));
        }
        if (length > remaining - header) {
            fail(ErrorCode::TruncatedElement,
                 describe(tag) + " declares " + std::to_string(length) + " bytes, " +
                     std::to_string(remaining - header) + " remain");
        }
        Element out{tag, bytes_.subspan(pos_ + header, length)};
        pos_ += header + length;
        return out;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_;
};

std::string_view as_text(std::span<const std::uint8_t> value) {
    std::string_view text(reinterpret_cast<const char*>(value.data()), value.size());
    const auto first = text.find_first_not_of(std::string_view(" \0", 2));
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(std::string_view(" \0", 2));
    return text.substr(first, last - first + 1);
}

std::uint16_t as_us(const Element& e) {
    if (e.value.size() != 2) fail(ErrorCode::MalformedValue, describe(e.tag) + " is not a 2-byte US");
    return load_u16(e.value, 0);
}

std::int64_t as_is(const Element& e) {
    auto text = as_text(e.value);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        fail(ErrorCode::MalformedValue, describe(e.tag) + " is not an integer string");
    }
    return value;
}

double as_ds(const Element& e) {
    auto text = as_text(e.value);
    if (const auto sep = text.find('\\'); sep != std::string_view::npos) text = text.substr(0, sep);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        fail(ErrorCode::MalformedValue, describe(e.tag) + " is not a decimal string");
    }
    return value;
}

struct Collected {
    std::optional<std::string> patient_id;
    std::optional<std::int64_t> instance_number;
    std::optional<std::uint16_t> rows;
    std::optional<std::uint16_t> cols;
    std::optional<std::uint16_t> bits_allocated;
    std::optional<std::uint16_t> pixel_representation;
    std::optional<double> slope;
    std::optional<double> intercept;
    std::optional<std::span<const std::uint8_t>> pixel_data;
};

template <typename T>
void set_once(std::optional<T>& slot, T value, Tag tag) {
    if (slot) fail(ErrorCode::DuplicateElement, describe(tag) + " appears twice");
    slot = std::move(value);
}

void collect(Collected& c, const Element& e) {
    if (e.tag == kPatientId) {
        set_once(c.patient_id, std::string(as_text(e.value)), e.tag);
    } else if (e.tag == kInstanceNumber) {
        set_once(c.instance_number, as_is(e), e.tag);
    } else if (e.tag == kRows) {
        set_once(c.rows, as_us(e), e.tag);
    } else if (e.tag == kColumns) {
        set_once(c.cols, as_us(e), e.tag);
    } else if (e.tag == kBitsAllocated) {
        set_once(c.bits_allocated, as_us(e), e.tag);
    } else if (e.tag == kPixelRepresentation) {
        set_once(c.pixel_representation, as_us(e), e.tag);
    } else if (e.tag == kRescaleSlope) {
        set_once(c.slope, as_ds(e), e.tag);
    } else if (e.tag == kRescaleIntercept) {
        set_once(c.intercept, as_ds(e), e.tag);
    } else if (e.tag == kSamplesPerPixel) {
        if (as_us(e) != 1) fail(ErrorCode::UnsupportedFormat, "only single-sample (grayscale) images");
    } else if (e.tag == kNumberOfFrames) {
        if (as_is(e) > 1) fail(ErrorCode::UnsupportedFormat, "multi-frame images are not supported");
    } else if (e.tag == kPixelData) {
        set_once(c.pixel_data, e.value, e.tag);
    }
}

std::pair<std::int32_t, std::int32_t> pixel_range(int bits, int representation) {
    if (representation == 1) {
        return {-(1 << (bits - 1)), (1 << (bits - 1)) - 1};
    }
    return {0, (1 << bits) - 1};
}

RawSlice assemble(Collected& c) {
    if (!c.pixel_data) fail(ErrorCode::MissingPixelData, "no (7FE0,0010) element");
    if (!c.rows) fail(ErrorCode::MissingTag, "Rows (0028,0010)");
    if (!c.cols) fail(ErrorCode::MissingTag, "Columns (0028,0011)");
    if (!c.bits_allocated) fail(ErrorCode::MissingTag, "BitsAllocated (0028,0100)");
    if (!c.instance_number) fail(ErrorCode::MissingTag, "InstanceNumber (0020,0013)");

    RawSlice slice;
    auto& m = slice.meta;
    m.patient_id = c.patient_id.value_or("");
    if (*c.instance_number < std::numeric_limits<std::int32_t>::min() ||
        *c.instance_number > std::numeric_limits<std::int32_t>::max()) {
        fail(ErrorCode::MalformedValue, "InstanceNumber out of range");
    }
    m.instance_number = static_cast<std::int32_t>(*c.instance_number);
    m.rows = *c.rows;
    m.cols = *c.cols;
    m.bits_allocated = *c.bits_allocated;
    m.pixel_representation = c.pixel_representation.value_or(0);
    m.rescale_slope = c.slope.value_or(1.0);
    m.rescale_intercept = c.intercept.value_or(0.0);

    if (m.rows == 0 || m.cols == 0) fail(ErrorCode::MalformedValue, "zero image dimension");
    if (m.bits_allocated != 8 && m.bits_allocated != 16) {
        fail(ErrorCode::UnsupportedFormat, "BitsAllocated " + std::to_string(m.bits_allocated));
    }
    if (m.pixel_representation > 1) {
        fail(ErrorCode::MalformedValue, "PixelRepresentation " + std::to_string(m.pixel_representation));
    }

    const std::size_t count = static_cast<std::size_t>(m.rows) * static_cast<std::size_t>(m.cols);
    const std::size_t bytes_per_pixel = static_cast<std::size_t>(m.bits_allocated / 8);
    const std::size_t expected = count * bytes_per_pixel;
    const auto data = *c.pixel_data;
    const bool padded = bytes_per_pixel == 1 && (expected % 2 == 1) && data.size() == expected + 1;
    if (data.size() != expected && !padded) {
        fail(ErrorCode::ShapeMismatch, "PixelData holds " + std::to_string(data.size()) +
                                           " bytes, expected " + std::to_string(expected));
    }

    slice.pixels.resize(count);
    const bool is_signed = m.pixel_representation == 1;
    if (bytes_per_pixel == 1) {
        for (std::size_t k = 0; k < count; ++k) {
            slice.pixels[k] = is_signed ? static_cast<std::int8_t>(data[k]) : data[k];
        }
    } else {
        for (std::size_t k = 0; k < count; ++k) {
            const std::uint16_t raw = load_u16(data, 2 * k);
            slice.pixels[k] = is_signed ? static_cast<std::int16_t>(raw) : raw;
        }
    }
    return slice;
}

// ---------------------------------------------------------------------------
// Writer helpers

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_element(std::vector<std::uint8_t>& out, Tag tag, std::string_view vr,
                 std::span<const std::uint8_t> value) {
    put_u16(out, tag.group);
    put_u16(out, tag.element);
    out.push_back(static_cast<std::uint8_t>(vr[0]));
    out.push_back(static_cast<std::uint8_t>(vr[1]));
    if (is_long_form_vr(vr)) {
        put_u16(out, 0);
        put_u32(out, static_cast<std::uint32_t>(value.size()));
    } else {
        put_u16(out, static_cast<std::uint16_t>(value.size()));
    }
    out.insert(out.end(), value.begin(), value.end());
}

/// Text VRs are padded to even length; UI pads with NUL, everything else with space.
void put_text(std::vector<std::uint8_t>& out, Tag tag, std::string_view vr, std::string_view text) {
    std::vector<std::uint8_t> value(text.begin(), text.end());
    if (value.size() % 2 == 1) value.push_back(vr == "UI" ? 0 : ' ');
    put_element(out, tag, vr, value);
}

void put_us(std::vector<std::uint8_t>& out, Tag tag, std::uint16_t v) {
    std::vector<std::uint8_t> value;
    put_u16(value, v);
    put_element(out, tag, "US", value);
}

std::string format_ds(double value, const char* name) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    std::string text(buf.data(), ptr);
    if (ec != std::errc{} || !std::isfinite(value) || text.size() > kMaxDsChars) {
        fail(ErrorCode::InvariantViolation,
             std::string(name) + " cannot be stored losslessly as a 16-character DS: " + text);
    }
    return text;
}

}  // namespace

void validate(const RawSlice& slice) {
    const auto& m = slice.meta;
    auto bad = [](const std::string& what) { fail(ErrorCode::InvariantViolation, what); };
    if (m.rows <= 0 || m.cols <= 0 || m.rows > 0xFFFF || m.cols > 0xFFFF) bad("rows/cols out of range");
    if (m.bits_allocated != 8 && m.bits_allocated != 16) bad("bits_allocated must be 8 or 16");
    if (m.pixel_representation != 0 && m.pixel_representation != 1) bad("pixel_representation must be 0 or 1");
    if (slice.pixels.size() != static_cast<std::size_t>(m.rows) * static_cast<std::size_t>(m.cols)) {
        bad("pixel count " + std::to_string(slice.pixels.size()) + " != rows x cols");
    }
    if (!std::isfinite(m.rescale_slope) || !std::isfinite(m.rescale_intercept)) bad("non-finite rescale");
    const auto [lo, hi] = pixel_range(m.bits_allocated, m.pixel_representation);
    const auto [mn, mx] = std::minmax_element(slice.pixels.begin(), slice.pixels.end());
    if (*mn < lo || *mx > hi) bad("pixel value outside the declared bit depth");
}

RawSlice parse_dicom(std::span<const std::uint8_t> bytes) {
    std::size_t start = 0;
    if (bytes.size() >= kPreambleSize + kMagic.size() &&
        std::memcmp(bytes.data() + kPreambleSize, kMagic.data(), kMagic.size()) == 0) {
        start = kPreambleSize + kMagic.size();
    }

    ElementReader reader(bytes, start);
    std::optional<bool> explicit_vr;

    // File meta group (0002,xxxx) is always explicit VR little endian.
    while (auto tag = reader.peek_tag()) {
        if (tag->group != 0x0002) break;
        const Element e = reader.next(true);
        if (e.tag == kTransferSyntaxUid) {
            const auto uid = as_text(e.value);
            if (uid == kExplicitVrLittleEndian) {
                explicit_vr = true;
            } else if (uid == kImplicitVrLittleEndian) {
                explicit_vr = false;
            } else {
                fail(ErrorCode::UnsupportedTransferSyntax, std::string(uid));
            }
        }
    }
    if (!explicit_vr) explicit_vr = reader.looks_explicit();

    Collected collected;
    while (!reader.done()) {
        const Element e = reader.next(*explicit_vr);
        if (collected.pixel_data) {
            fail(ErrorCode::PixelDataNotLast, describe(e.tag) + " follows PixelData");
        }
        collect(collected, e);
    }
    return assemble(collected);
}

std::vector<std::uint8_t> write_dicom_lite(const RawSlice& slice) {
    validate(slice);
    const auto& m = slice.meta;
    // LO values: at most 64 characters, no backslash, no significant edge spaces.
    auto bad_id = [](const std::string& what) { fail(ErrorCode::InvariantViolation, "patient_id " + what); };
    if (m.patient_id.size() > 64) bad_id("longer than 64 characters");
    for (const char ch : m.patient_id) {
        if (ch < 0x20 || ch > 0x7E || ch == '\\') bad_id("must be printable ASCII without '\\'");
    }
    if (!m.patient_id.empty() && (m.patient_id.front() == ' ' || m.patient_id.back() == ' ')) {
        bad_id("has leading or trailing spaces");
    }
    const std::string slope = format_ds(m.rescale_slope, "rescale_slope");
    const std::string intercept = format_ds(m.rescale_intercept, "rescale_intercept");

    std::vector<std::uint8_t> meta;
    put_element(meta, {0x0002, 0x0001}, "OB", std::array<std::uint8_t, 2>{0x00, 0x01});
    put_text(meta, {0x0002, 0x0002}, "UI", kCtImageStorage);
    put_text(meta, kTransferSyntaxUid, "UI", kExplicitVrLittleEndian);

    const std::size_t bytes_per_pixel = static_cast<std::size_t>(m.bits_allocated / 8);
    std::vector<std::uint8_t> out;
    out.reserve(kPreambleSize + 512 + slice.pixels.size() * bytes_per_pixel);
    out.resize(kPreambleSize, 0);
    out.insert(out.end(), kMagic.begin(), kMagic.end());
    std::vector<std::uint8_t> group_length;
    put_u32(group_length, static_cast<std::uint32_t>(meta.size()));
    put_element(out, {0x0002, 0x0000}, "UL", group_length);
    out.insert(out.end(), meta.begin(), meta.end());

    put_text(out, {0x0008, 0x0060}, "CS", "CT");
    put_text(out, kPatientId, "LO", m.patient_id);
    put_text(out, kInstanceNumber, "IS", std::to_string(m.instance_number));
    put_us(out, kSamplesPerPixel, 1);
    put_text(out, {0x0028, 0x0004}, "CS", "MONOCHROME2");
    put_us(out, kRows, static_cast<std::uint16_t>(m.rows));
    put_us(out, kColumns, static_cast<std::uint16_t>(m.cols));
    put_us(out, kBitsAllocated, static_cast<std::uint16_t>(m.bits_allocated));
    put_us(out, {0x0028, 0x0101}, static_cast<std::uint16_t>(m.bits_allocated));
    put_us(out, {0x0028, 0x0102}, static_cast<std::uint16_t>(m.bits_allocated - 1));
    put_us(out, kPixelRepresentation, static_cast<std::uint16_t>(m.pixel_representation));
    put_text(out, kRescaleIntercept, "DS", intercept);
    put_text(out, kRescaleSlope, "DS", slope);

    std::vector<std::uint8_t> pixels;
    pixels.reserve(slice.pixels.size() * bytes_per_pixel + 1);
    if (bytes_per_pixel == 1) {
        for (const auto p : slice.pixels) pixels.push_back(static_cast<std::uint8_t>(p));
        if (pixels.size() % 2 == 1) pixels.push_back(0);
        put_element(out, kPixelData, "OB", pixels);
    } else {
        for (const auto p : slice.pixels) put_u16(pixels, static_cast<std::uint16_t>(p));
        put_element(out, kPixelData, "OW", pixels);
    }
    return out;
}

RawSlice read_dicom_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail(ErrorCode::IoFailure, "cannot read " + path.string());
    try {
        return parse_dicom(bytes);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.message());
    }
}

void write_dicom_file(const std::filesystem::path& path, const RawSlice& slice) {
    const auto bytes = write_dicom_lite(slice);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
}

}  // namespace ctpji::dicom
