#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fruitscan/formats.hpp"
#include "fruitscan/fusion.hpp"
#include "fruitscan/phenotype.hpp"
#include "fruitscan/pose.hpp"

namespace fruitscan::pipeline {

inline constexpr int kReportSchema = 1;

struct PipelineOptions {
    fusion::DepthMode depth_mode = fusion::DepthMode::Center;
};

/// One manifest fruit. Either `error` is set, or all measurement fields are.
struct FruitRecord {
    int id = 0;
    std::optional<phenotype::PixelPhenotype> pixel;
    std::optional<fusion::MetricPhenotype> metric;
    std::optional<double> depth_cm;
    std::optional<double> theta_deg;  ///< absent when pose correction was skipped
    bool pose_corrected = false;
    std::vector<std::string> warnings;
    std::optional<std::string> error;
    std::optional<ErrorCode> error_code;
};

struct PipelineReport {
    std::string image;
    std::string depth;
    fusion::CalibrationModel calibration;
    fusion::DepthMode depth_mode = fusion::DepthMode::Center;
    std::vector<FruitRecord> fruits;  ///< sorted by fruit id
    std::optional<double> elapsed_ms;

    std::size_t error_count() const;
};

/// Separate, pose-correct, measure, sample depth and fuse every fruit.
/// Per-fruit failures are recorded in the report and never thrown.
PipelineReport run_phenotype(const formats::SceneManifest& manifest, const ImageBuffer& image,
                             const DepthMap& depth, const fusion::CalibrationModel& model,
                             const PipelineOptions& options = {});

/// Accepts either a `depth_cm,pixels_per_cm` CSV (fitted on load) or a
/// `k=<value>` model file.
fusion::CalibrationModel load_calibration(const std::filesystem::path& path);

/// Loads manifest, image, depth map and calibration; any of these failing is
/// fatal and throws.
PipelineReport run_phenotype_files(const std::filesystem::path& manifest_path,
                                   const std::filesystem::path& calibration_path,
                                   const PipelineOptions& options = {});

/// Deterministic JSON (schema 1). Timing is only written when requested.
std::string report_to_json(const PipelineReport& report, bool include_timing = false);

}  // namespace fruitscan::pipeline
