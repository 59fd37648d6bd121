#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fruitscan/geometry.hpp"
#include "fruitscan/raster.hpp"

namespace fruitscan::formats {

// ---------------------------------------------------------------------------
// Netpbm rasters
// ---------------------------------------------------------------------------

enum class PnmEncoding { Binary, Ascii };

struct PnmHeader {
    char magic = 0;  ///< '2', '3', '5' or '6'
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::size_t data_offset = 0;  ///< byte offset of the first sample
};

/// Parses the magic, dimensions and maxval. Comments ('#' to end of line)
/// are allowed between header tokens.
PnmHeader parse_pnm_header(std::string_view bytes);

/// P2/P3/P5/P6 with maxval 255.
ImageBuffer decode_image(std::string_view bytes);
std::string encode_image(const ImageBuffer& image, PnmEncoding encoding = PnmEncoding::Binary);

ImageBuffer read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const ImageBuffer& image,
                 PnmEncoding encoding = PnmEncoding::Binary);

/// Header only; used to bounds-check manifests without decoding samples.
PnmHeader peek_image_header(const std::filesystem::path& path);

/// 16-bit binary PGM (P5, maxval 65535, big-endian). Samples are millimeters
/// and are converted to centimeters.
DepthMap decode_depth(std::string_view bytes);
std::string encode_depth(const DepthMap& depth);

DepthMap read_depth(const std::filesystem::path& path);
void write_depth(const std::filesystem::path& path, const DepthMap& depth);

// ---------------------------------------------------------------------------
// Scene manifests
// ---------------------------------------------------------------------------

struct Box {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    geometry::Point center() const noexcept { return {x + 0.5 * w, y + 0.5 * h}; }
    friend bool operator==(const Box&, const Box&) = default;
};

struct FruitEntry {
    int id = 0;
    Box box;
    double confidence = 0.0;
    geometry::Point body;
    std::optional<geometry::Point> carpopodium;  ///< absent: pose correction unavailable
    geometry::Polygon pred_polygon;
    std::optional<geometry::Polygon> gt_polygon;
};

struct SceneManifest {
    std::filesystem::path image;  ///< resolved against the manifest directory
    std::filesystem::path depth;
    std::vector<FruitEntry> fruits;
};

/// Parses and validates a manifest document. Relative paths are resolved
/// against `base_dir`.
SceneManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir = {});

/// Reads a manifest from disk. When the referenced image header can be read,
/// every box is also checked against the image bounds.
SceneManifest read_manifest(const std::filesystem::path& path);

/// Throws OutOfBounds if a box or keypoint leaves a width x height image.
void validate_bounds(const SceneManifest& manifest, int width, int height);

// ---------------------------------------------------------------------------
// Calibration samples and model file
// ---------------------------------------------------------------------------

struct CalibrationSample {
    double depth_cm = 0.0;
    double pixels_per_cm = 0.0;
};

/// CSV with header `depth_cm,pixels_per_cm`. Errors name the offending line.
std::vector<CalibrationSample> parse_calibration_csv(std::string_view text);
std::vector<CalibrationSample> read_calibration_csv(const std::filesystem::path& path);
std::string encode_calibration_csv(const std::vector<CalibrationSample>& samples);

/// Model file: a single `k=<value>` line.
std::string encode_calibration_model(double k);
double parse_calibration_model(std::string_view text);

// ---------------------------------------------------------------------------
// Phenotype ground-truth table
// ---------------------------------------------------------------------------

struct TraitTriple {
    double truth = 0.0;      ///< P_t
    double predicted = 0.0;  ///< P_p
    double printed_error = 0.0;  ///< P_e as printed, percent
};

struct GroundTruthRow {
    int plant = 0;
    int fruit = 0;
    TraitTriple width;   ///< cm
    TraitTriple height;  ///< cm
    TraitTriple area;    ///< cm^2
    TraitTriple volume;  ///< cm^3
};

inline constexpr std::string_view kPhenotypeCsvHeader =
    "plant,fruit,W_t,W_p,W_e,H_t,H_p,H_e,A_t,A_p,A_e,V_t,V_p,V_e";

std::vector<GroundTruthRow> parse_phenotype_csv(std::string_view text);
std::vector<GroundTruthRow> read_phenotype_csv(const std::filesystem::path& path);

/// The 31-row greenhouse test table that ships with the library.
std::vector<GroundTruthRow> load_bundled_phenotype_table();

/// Raw bundled CSV bytes, exactly as shipped in core/data.
std::string_view bundled_phenotype_csv();

// ---------------------------------------------------------------------------
// Small file helpers
// ---------------------------------------------------------------------------

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace fruitscan::formats
