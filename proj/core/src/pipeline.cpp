#include "fruitscan/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include <json.hpp>

namespace fruitscan::pipeline {

namespace {

using geometry::Point;

FruitRecord process_fruit(const formats::FruitEntry& fruit, const ImageBuffer& image, const DepthMap& depth,
                          const fusion::CalibrationModel& model, const PipelineOptions& options) {
    FruitRecord rec;
    rec.id = fruit.id;
    try {
        Diagnostics diag;
        const phenotype::PixelRect rect = phenotype::to_pixel_rect(fruit.box);
        const ImageBuffer region = phenotype::crop_individual(image, fruit.box);
        const Point offset{-static_cast<double>(rect.x), -static_cast<double>(rect.y)};

        geometry::Polygon contour = geometry::translate_polygon(fruit.pred_polygon, offset);
        pose::KeypointPair kp{fruit.body + offset, std::nullopt};
        if (fruit.carpopodium) kp.carpopodium = *fruit.carpopodium + offset;

        if (kp.carpopodium) {
            const pose::CorrectedFruit corrected = pose::correct_pose(region, contour, kp);
            contour = corrected.polygon;
            rec.theta_deg = corrected.pose.theta * 180.0 / std::numbers::pi;
            rec.pose_corrected = true;
        } else {
            diag.warn("carpopodium keypoint missing; pose correction skipped");
        }

        const phenotype::PixelPhenotype px = phenotype::measure(contour, &diag);
        const double d = fusion::depth_at(depth, fruit.box, options.depth_mode, &fruit.pred_polygon);
        rec.metric = fusion::fuse(px, model, d);
        rec.pixel = px;
        rec.depth_cm = d;
        rec.warnings = std::move(diag.warnings);
    } catch (const Error& e) {
        rec = FruitRecord{};
        rec.id = fruit.id;
        rec.error = e.what();
        rec.error_code = e.code();
    }
    return rec;
}

}  // namespace

std::size_t PipelineReport::error_count() const {
    return static_cast<std::size_t>(
        std::count_if(fruits.begin(), fruits.end(), [](const FruitRecord& r) { return r.error.has_value(); }));
}

PipelineReport run_phenotype(const formats::SceneManifest& manifest, const ImageBuffer& image,
                             const DepthMap& depth, const fusion::CalibrationModel& model,
                             const PipelineOptions& options) {
    if (depth.width() != image.width() || depth.height() != image.height()) {
        throw Error(ErrorCode::DimensionMismatch, "depth map resolution differs from the image");
    }
    formats::validate_bounds(manifest, image.width(), image.height());

    PipelineReport report;
    report.image = manifest.image.generic_string();
    report.depth = manifest.depth.generic_string();
    report.calibration = model;
    report.depth_mode = options.depth_mode;
    report.fruits.reserve(manifest.fruits.size());
    for (const auto& fruit : manifest.fruits) {
        report.fruits.push_back(process_fruit(fruit, image, depth, model, options));
    }
    std::stable_sort(report.fruits.begin(), report.fruits.end(),
                     [](const FruitRecord& a, const FruitRecord& b) { return a.id < b.id; });
    return report;
}

fusion::CalibrationModel load_calibration(const std::filesystem::path& path) {
    const std::string text = formats::read_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text.compare(first, 2, "k=") == 0) {
        fusion::CalibrationModel model;
        model.k = formats::parse_calibration_model(text);
        return model;
    }
    const auto samples = formats::parse_calibration_csv(text);
    return fusion::fit_calibration(samples);
}

PipelineReport run_phenotype_files(const std::filesystem::path& manifest_path,
                                   const std::filesystem::path& calibration_path, const PipelineOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const formats::SceneManifest manifest = formats::read_manifest(manifest_path);
    const fusion::CalibrationModel model = load_calibration(calibration_path);
    const ImageBuffer image = formats::read_image(manifest.image);
    const DepthMap depth = formats::read_depth(manifest.depth);
    PipelineReport report = run_phenotype(manifest, image, depth, model, options);
    report.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::string report_to_json(const PipelineReport& report, bool include_timing) {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["schema"] = kReportSchema;
    doc["image"] = report.image;
    doc["depth"] = report.depth;
    doc["depth_mode"] = std::string(fusion::to_string(report.depth_mode));
    doc["calibration"] = {{"k", report.calibration.k},
                          {"n_samples", report.calibration.n_samples},
                          {"rms_residual", report.calibration.rms_residual}};
    ordered_json fruits = ordered_json::array();
    for (const FruitRecord& r : report.fruits) {
        ordered_json f;
        f["id"] = r.id;
        if (r.error) {
            f["error"] = *r.error;
            f["error_code"] = std::string(to_string(*r.error_code));
        } else {
            f["pose_corrected"] = r.pose_corrected;
            f["theta_deg"] = r.theta_deg ? ordered_json(*r.theta_deg) : ordered_json(nullptr);
            f["pixel"] = {{"width_px", r.pixel->width_px},
                          {"height_px", r.pixel->height_px},
                          {"area_px2", r.pixel->area_px2},
                          {"volume_px3", r.pixel->volume_px3}};
            f["depth_cm"] = *r.depth_cm;
            f["metric"] = {{"width_cm", r.metric->width_cm},
                           {"height_cm", r.metric->height_cm},
                           {"area_cm2", r.metric->area_cm2},
                           {"volume_cm3", r.metric->volume_cm3},
                           {"scale_px_per_cm", r.metric->scale_px_per_cm}};
        }
        f["warnings"] = r.warnings;
        fruits.push_back(std::move(f));
    }
    doc["fruits"] = std::move(fruits);
    doc["measured_count"] = report.fruits.size() - report.error_count();
    doc["error_count"] = report.error_count();
    if (include_timing && report.elapsed_ms) doc["elapsed_ms"] = *report.elapsed_ms;
    return doc.dump(2) + "\n";
}

}  // namespace fruitscan::pipeline
