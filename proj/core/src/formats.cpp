#include "fruitscan/formats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fruitscan::formats {

namespace detail {
extern const std::string_view kBundledPhenotypeCsv;
}  // namespace detail

namespace {

using geometry::Point;
using geometry::Polygon;
using nlohmann::json;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

class PnmTokenizer {
public:
    PnmTokenizer(std::string_view bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    // Non-negative decimal integer; `what` names the field for error messages.
    long next_uint(const char* what, ErrorCode eof_code) {
        skip_space_and_comments();
        if (pos_ >= bytes_.size()) {
            throw Error(eof_code, std::string("unexpected end of data reading ") + what);
        }
        long value = 0;
        const char* first = bytes_.data() + pos_;
        const char* last = bytes_.data() + bytes_.size();
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || value < 0 || (ptr < last && !is_space(*ptr) && *ptr != '#')) {
            throw Error(ErrorCode::Parse, std::string("malformed ") + what);
        }
        pos_ = static_cast<std::size_t>(ptr - bytes_.data());
        return value;
    }

    std::size_t pos() const noexcept { return pos_; }

private:
    std::string_view bytes_;
    std::size_t pos_;
};

std::string ltrim_plus(std::string_view s) {
    std::string out(s);
    if (!out.empty() && out.front() == '+') out.erase(out.begin());
    return out;
}

double parse_double(std::string_view field, const std::string& context) {
    // from_chars rejects a leading '+', which the ground-truth table uses.
    const std::string text = ltrim_plus(field);
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc{} || ptr != last) {
        throw Error(ErrorCode::Parse, context + ": cannot parse number '" + std::string(field) + "'");
    }
    return value;
}

int parse_int(std::string_view field, const std::string& context) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
        throw Error(ErrorCode::Parse, context + ": cannot parse integer '" + std::string(field) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t at = line.find(sep, start);
        out.push_back(line.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
        if (at == std::string_view::npos) break;
        start = at + 1;
    }
    for (auto& f : out) {
        while (!f.empty() && is_space(f.front())) f.remove_prefix(1);
        while (!f.empty() && is_space(f.back())) f.remove_suffix(1);
    }
    return out;
}

// Lines with trailing '\r' removed; 1-based numbering is the caller's index + 1.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

bool blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), is_space);
}

// ---- manifest helpers ------------------------------------------------------

[[noreturn]] void schema_error(const std::string& message) {
    throw Error(ErrorCode::Parse, "manifest: " + message);
}

const json& require(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(where + ": missing field '" + key + "'");
    return *it;
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) schema_error(where + ": expected a number");
    return v.get<double>();
}

Point point(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2) schema_error(where + ": expected [x, y]");
    return {number(v[0], where), number(v[1], where)};
}

Polygon polygon(const json& v, const std::string& where) {
    if (!v.is_array()) schema_error(where + ": expected a list of [x, y] vertices");
    std::vector<Point> vertices;
    vertices.reserve(v.size());
    for (const json& p : v) vertices.push_back(point(p, where));
    try {
        return Polygon(std::move(vertices));
    } catch (const Error& e) {
        throw Error(e.code(), where + ": " + e.what());
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Netpbm
// ---------------------------------------------------------------------------

PnmHeader parse_pnm_header(std::string_view bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P') {
        throw Error(ErrorCode::Parse, "not a Netpbm file: bad magic");
    }
    PnmHeader header;
    header.magic = bytes[1];
    if (header.magic != '2' && header.magic != '3' && header.magic != '5' && header.magic != '6') {
        throw Error(ErrorCode::Unsupported, std::string("unsupported Netpbm variant P") + header.magic);
    }
    if (bytes.size() > 2 && !is_space(bytes[2]) && bytes[2] != '#') {
        throw Error(ErrorCode::Parse, "malformed Netpbm magic");
    }
    PnmTokenizer tok(bytes, 2);
    header.width = static_cast<int>(tok.next_uint("width", ErrorCode::Parse));
    header.height = static_cast<int>(tok.next_uint("height", ErrorCode::Parse));
    header.maxval = static_cast<int>(tok.next_uint("maxval", ErrorCode::Parse));
    if (header.width <= 0 || header.height <= 0) {
        throw Error(ErrorCode::Parse, "Netpbm dimensions must be positive");
    }
    if (header.maxval <= 0 || header.maxval > 65535) {
        throw Error(ErrorCode::Parse, "Netpbm maxval out of range");
    }
    std::size_t pos = tok.pos();
    // Exactly one whitespace byte separates the header from binary samples.
    if (pos >= bytes.size() || !is_space(bytes[pos])) {
        if (header.magic == '5' || header.magic == '6') {
            throw Error(ErrorCode::Truncated, "missing separator after Netpbm header");
        }
    } else {
        ++pos;
    }
    header.data_offset = pos;
    return header;
}

ImageBuffer decode_image(std::string_view bytes) {
    const PnmHeader header = parse_pnm_header(bytes);
    if (header.maxval != 255) {
        throw Error(ErrorCode::Unsupported,
                    "unsupported maxval " + std::to_string(header.maxval) + " (expected 255)");
    }
    const int channels = (header.magic == '3' || header.magic == '6') ? 3 : 1;
    const std::size_t count = static_cast<std::size_t>(header.width) *
                              static_cast<std::size_t>(header.height) *
                              static_cast<std::size_t>(channels);
    std::vector<std::uint8_t> data(count);
    if (header.magic == '5' || header.magic == '6') {
        if (bytes.size() - header.data_offset < count) {
            throw Error(ErrorCode::Truncated, "truncated data: expected " + std::to_string(count) +
                                                  " sample bytes, found " +
                                                  std::to_string(bytes.size() - header.data_offset));
        }
        std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(header.data_offset), count, data.begin());
    } else {
        PnmTokenizer tok(bytes, header.data_offset);
        for (std::size_t i = 0; i < count; ++i) {
            const long v = tok.next_uint("sample", ErrorCode::Truncated);
            if (v > header.maxval) throw Error(ErrorCode::Parse, "sample exceeds maxval");
            data[i] = static_cast<std::uint8_t>(v);
        }
    }
    return ImageBuffer(header.width, header.height, channels, std::move(data));
}

std::string encode_image(const ImageBuffer& image, PnmEncoding encoding) {
    const bool rgb = image.channels() == 3;
    const char magic = encoding == PnmEncoding::Binary ? (rgb ? '6' : '5') : (rgb ? '3' : '2');
    std::string out = std::string("P") + magic + "\n" + std::to_string(image.width()) + " " +
                      std::to_string(image.height()) + "\n255\n";
    if (encoding == PnmEncoding::Binary) {
        out.append(image.data().begin(), image.data().end());
        return out;
    }
    const std::size_t row = static_cast<std::size_t>(image.width()) * static_cast<std::size_t>(image.channels());
    for (std::size_t i = 0; i < image.data().size(); ++i) {
        out += std::to_string(image.data()[i]);
        out += ((i + 1) % row == 0) ? '\n' : ' ';
    }
    return out;
}

ImageBuffer read_image(const std::filesystem::path& path) {
    try {
        return decode_image(read_file(path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Io) throw;
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void write_image(const std::filesystem::path& path, const ImageBuffer& image, PnmEncoding encoding) {
    write_file(path, encode_image(image, encoding));
}

PnmHeader peek_image_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::string head(512, '\0');
    in.read(head.data(), static_cast<std::streamsize>(head.size()));
    head.resize(static_cast<std::size_t>(in.gcount()));
    return parse_pnm_header(head);
}

DepthMap decode_depth(std::string_view bytes) {
    const PnmHeader header = parse_pnm_header(bytes);
    if (header.magic != '5') {
        throw Error(ErrorCode::Unsupported, "depth maps must be binary PGM (P5)");
    }
    if (header.maxval != 65535) {
        throw Error(ErrorCode::Unsupported,
                    "depth map maxval must be 65535, got " + std::to_string(header.maxval));
    }
    const std::size_t count = static_cast<std::size_t>(header.width) * static_cast<std::size_t>(header.height);
    if (bytes.size() - header.data_offset < 2 * count) {
        throw Error(ErrorCode::Truncated, "truncated depth data: expected " + std::to_string(2 * count) +
                                              " bytes, found " +
                                              std::to_string(bytes.size() - header.data_offset));
    }
    std::vector<double> cm(count);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + header.data_offset);
    for (std::size_t i = 0; i < count; ++i) {
        const unsigned mm = (static_cast<unsigned>(p[2 * i]) << 8) | static_cast<unsigned>(p[2 * i + 1]);
        cm[i] = mm / 10.0;
    }
    return DepthMap(header.width, header.height, std::move(cm));
}

std::string encode_depth(const DepthMap& depth) {
    std::string out = "P5\n" + std::to_string(depth.width()) + " " + std::to_string(depth.height()) + "\n65535\n";
    out.reserve(out.size() + 2 * depth.data().size());
    for (const double cm : depth.data()) {
        const double mm = std::round(cm * 10.0);
        if (mm < 0.0 || mm > 65535.0) {
            throw Error(ErrorCode::InvalidArgument, "depth value does not fit a 16-bit millimeter sample");
        }
        const auto v = static_cast<unsigned>(mm);
        out.push_back(static_cast<char>((v >> 8) & 0xFF));
        out.push_back(static_cast<char>(v & 0xFF));
    }
    return out;
}

DepthMap read_depth(const std::filesystem::path& path) {
    try {
        return decode_depth(read_file(path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Io) throw;
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void write_depth(const std::filesystem::path& path, const DepthMap& depth) {
    write_file(path, encode_depth(depth));
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

SceneManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        schema_error(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) schema_error("top level must be an object");

    const auto resolve = [&](const json& v, const char* key) {
        if (!v.is_string()) schema_error(std::string("'") + key + "' must be a string");
        std::filesystem::path p = v.get<std::string>();
        return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };

    SceneManifest manifest;
    manifest.image = resolve(require(doc, "image", "manifest"), "image");
    manifest.depth = resolve(require(doc, "depth", "manifest"), "depth");

    const json& fruits = require(doc, "fruits", "manifest");
    if (!fruits.is_array()) schema_error("'fruits' must be a list");

    std::set<int> seen;
    for (std::size_t i = 0; i < fruits.size(); ++i) {
        const json& f = fruits[i];
        std::string where = "fruits[" + std::to_string(i) + "]";
        if (!f.is_object()) schema_error(where + ": expected an object");

        const json& id = require(f, "id", where);
        if (!id.is_number_integer()) schema_error(where + ": 'id' must be an integer");
        const int fruit_id = id.get<int>();
        where = "fruit " + std::to_string(fruit_id);
        if (!seen.insert(fruit_id).second) schema_error(where + ": duplicate id");

        const json& box = require(f, "box", where);
        if (!box.is_array() || box.size() != 4) schema_error(where + ": 'box' must be [x, y, w, h]");
        const Box b{number(box[0], where), number(box[1], where), number(box[2], where), number(box[3], where)};
        if (b.w <= 0.0 || b.h <= 0.0) schema_error(where + ": box width and height must be positive");
        if (b.x < 0.0 || b.y < 0.0) {
            throw Error(ErrorCode::OutOfBounds, "manifest: " + where + ": box lies outside the image");
        }

        const double confidence = number(require(f, "confidence", where), where);
        if (!(confidence >= 0.0 && confidence <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument,
                        "manifest: " + where + ": confidence must be in [0, 1]");
        }

        const Point body = point(require(f, "body", where), where + ".body");
        std::optional<Point> carpopodium;
        if (const auto it = f.find("carpopodium"); it != f.end() && !it->is_null()) {
            carpopodium = point(*it, where + ".carpopodium");
            if (*carpopodium == body) {
                throw Error(ErrorCode::InvalidArgument,
                            "manifest: " + where + ": body and carpopodium coincide");
            }
        }

        Polygon pred = polygon(require(f, "pred_polygon", where), "manifest: " + where + ".pred_polygon");
        std::optional<Polygon> gt;
        if (const auto it = f.find("gt_polygon"); it != f.end() && !it->is_null()) {
            gt = polygon(*it, "manifest: " + where + ".gt_polygon");
        }

        manifest.fruits.push_back(FruitEntry{fruit_id, b, confidence, body, carpopodium, std::move(pred), std::move(gt)});
    }
    return manifest;
}

SceneManifest read_manifest(const std::filesystem::path& path) {
    SceneManifest manifest = parse_manifest(read_file(path), path.parent_path());
    std::error_code ec;
    if (std::filesystem::is_regular_file(manifest.image, ec)) {
        const PnmHeader header = peek_image_header(manifest.image);
        validate_bounds(manifest, header.width, header.height);
    }
    return manifest;
}

void validate_bounds(const SceneManifest& manifest, int width, int height) {
    const auto inside = [&](Point p) { return p.x >= 0.0 && p.y >= 0.0 && p.x <= width && p.y <= height; };
    for (const FruitEntry& f : manifest.fruits) {
        const std::string where = "manifest: fruit " + std::to_string(f.id);
        if (f.box.x < 0.0 || f.box.y < 0.0 || f.box.x + f.box.w > width || f.box.y + f.box.h > height) {
            throw Error(ErrorCode::OutOfBounds, where + ": box exceeds the " + std::to_string(width) + "x" +
                                                    std::to_string(height) + " image");
        }
        if (!inside(f.body) || (f.carpopodium && !inside(*f.carpopodium))) {
            throw Error(ErrorCode::OutOfBounds, where + ": keypoint outside the image");
        }
    }
}

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

std::vector<CalibrationSample> parse_calibration_csv(std::string_view text) {
    const auto lines = split_lines(text);
    std::size_t i = 0;
    while (i < lines.size() && blank(lines[i])) ++i;
    if (i == lines.size()) throw Error(ErrorCode::Parse, "calibration CSV is empty");
    const auto header = split(lines[i], ',');
    if (header.size() != 2 || header[0] != "depth_cm" || header[1] != "pixels_per_cm") {
        throw Error(ErrorCode::Parse, "calibration CSV line " + std::to_string(i + 1) +
                                          ": expected header 'depth_cm,pixels_per_cm'");
    }
    std::vector<CalibrationSample> samples;
    for (++i; i < lines.size(); ++i) {
        if (blank(lines[i])) continue;
        const std::string context = "calibration CSV line " + std::to_string(i + 1);
        const auto fields = split(lines[i], ',');
        if (fields.size() != 2) throw Error(ErrorCode::Parse, context + ": expected 2 fields");
        const CalibrationSample s{parse_double(fields[0], context), parse_double(fields[1], context)};
        if (!(s.depth_cm > 0.0)) throw Error(ErrorCode::InvalidArgument, context + ": depth_cm must be > 0");
        if (!(s.pixels_per_cm > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, context + ": pixels_per_cm must be > 0");
        }
        samples.push_back(s);
    }
    if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "calibration CSV has no samples");
    return samples;
}

std::vector<CalibrationSample> read_calibration_csv(const std::filesystem::path& path) {
    return parse_calibration_csv(read_file(path));
}

std::string encode_calibration_csv(const std::vector<CalibrationSample>& samples) {
    std::ostringstream out;
    out.precision(17);
    out << "depth_cm,pixels_per_cm\n";
    for (const auto& s : samples) out << s.depth_cm << ',' << s.pixels_per_cm << '\n';
    return out.str();
}

std::string encode_calibration_model(double k) {
    std::ostringstream out;
    out.precision(17);
    out << "k=" << k << '\n';
    return out.str();
}

double parse_calibration_model(std::string_view text) {
    for (std::string_view line : split_lines(text)) {
        if (blank(line)) continue;
        const auto fields = split(line, '=');
        if (fields.size() != 2 || fields[0] != "k") {
            throw Error(ErrorCode::Parse, "calibration model: expected 'k=<value>'");
        }
        const double k = parse_double(fields[1], "calibration model");
        if (!(k > 0.0)) throw Error(ErrorCode::InvalidArgument, "calibration model: k must be > 0");
        return k;
    }
    throw Error(ErrorCode::Parse, "calibration model file is empty");
}

// ---------------------------------------------------------------------------
// Ground-truth table
// ---------------------------------------------------------------------------

std::vector<GroundTruthRow> parse_phenotype_csv(std::string_view text) {
    const auto lines = split_lines(text);
    std::size_t i = 0;
    while (i < lines.size() && blank(lines[i])) ++i;
    if (i == lines.size() || split(lines[i], ',') != split(kPhenotypeCsvHeader, ',')) {
        throw Error(ErrorCode::Parse, "phenotype CSV: expected header '" + std::string(kPhenotypeCsvHeader) + "'");
    }
    std::vector<GroundTruthRow> rows;
    for (++i; i < lines.size(); ++i) {
        if (blank(lines[i])) continue;
        const std::string context = "phenotype CSV line " + std::to_string(i + 1);
        const auto f = split(lines[i], ',');
        if (f.size() != 14) throw Error(ErrorCode::Parse, context + ": expected 14 fields");
        const auto triple = [&](std::size_t at) {
            TraitTriple t{parse_double(f[at], context), parse_double(f[at + 1], context),
                          parse_double(f[at + 2], context)};
            if (!(t.truth > 0.0) || !(t.predicted > 0.0)) {
                throw Error(ErrorCode::InvalidArgument, context + ": trait values must be > 0");
            }
            return t;
        };
        rows.push_back(GroundTruthRow{parse_int(f[0], context), parse_int(f[1], context), triple(2), triple(5),
                                      triple(8), triple(11)});
    }
    return rows;
}

std::vector<GroundTruthRow> read_phenotype_csv(const std::filesystem::path& path) {
    return parse_phenotype_csv(read_file(path));
}

std::string_view bundled_phenotype_csv() { return detail::kBundledPhenotypeCsv; }

std::vector<GroundTruthRow> load_bundled_phenotype_table() {
    return parse_phenotype_csv(detail::kBundledPhenotypeCsv);
}

// ---------------------------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace fruitscan::formats
