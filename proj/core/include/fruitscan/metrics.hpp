#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fruitscan/formats.hpp"
#include "fruitscan/geometry.hpp"

namespace fruitscan::metrics {

enum class Trait { Width, Height, Area, Volume };

inline constexpr Trait kAllTraits[] = {Trait::Width, Trait::Height, Trait::Area, Trait::Volume};

std::string_view to_string(Trait trait);
const formats::TraitTriple& trait_of(const formats::GroundTruthRow& row, Trait trait);

/// Signed percent: (predicted - truth) / truth * 100.
double relative_error(double truth, double predicted);

struct BoxStats {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t n = 0;
};

/// Tukey hinges: quartiles are medians of the lower/upper halves, with the
/// overall median excluded from both halves when n is odd. n = 1 gives
/// q1 = q3 = median.
BoxStats box_stats(std::span<const double> values);

double median(std::span<const double> values);

// ---- mean edge error -------------------------------------------------------

struct MaskPair {
    geometry::Polygon pred;
    geometry::Polygon gt;
};

struct EdgeErrorReport {
    std::vector<double> per_pair_percent;  ///< mean normalized distance per pair, percent
    double mee_percent = 0.0;
    std::size_t pair_count = 0;      ///< M
    int samples_per_mask = 0;        ///< N
};

inline constexpr int kDefaultEdgeSamples = 100;

/// Mean distance from `n_samples` arc-length samples of `pred` to the `gt`
/// contour, divided by the gt bounding-box diagonal, in percent.
double edge_error_percent(const geometry::Polygon& pred, const geometry::Polygon& gt,
                          int n_samples = kDefaultEdgeSamples);

/// mEE: the unweighted mean of edge_error_percent over all pairs.
EdgeErrorReport mean_edge_error(std::span<const MaskPair> pairs, int n_samples = kDefaultEdgeSamples);

// ---- detection -------------------------------------------------------------

/// |A and B| / |A or B| on width x height rasters; 0 when both are empty.
double mask_iou(const geometry::Polygon& a, const geometry::Polygon& b, int width, int height);

struct Prediction {
    geometry::Polygon polygon;
    double confidence = 0.0;
};

struct DetectionScene {
    int width = 0;
    int height = 0;
    std::vector<Prediction> predictions;
    std::vector<geometry::Polygon> ground_truth;
};

struct DetectionEval {
    double precision = 0.0;
    double recall = 0.0;
    double map50 = 0.0;
    double iou_threshold = 0.5;
    double confidence_threshold = 0.5;
    std::size_t true_positives = 0;   ///< at the confidence threshold
    std::size_t false_positives = 0;  ///< at the confidence threshold
    std::size_t ground_truths = 0;
};

/// Single-class evaluation. Predictions are matched greedily per scene in
/// descending confidence; each gt is claimed at most once by its best
/// unclaimed IoU >= 0.5 partner. AP50 uses all-point interpolation of the
/// precision envelope. Zero denominators yield 0.
DetectionEval detection_eval(std::span<const DetectionScene> scenes, double iou_threshold = 0.5,
                             double confidence_threshold = 0.5);

/// All-point interpolated average precision from (recall, precision) points
/// ordered by descending confidence.
double average_precision(std::span<const double> recall, std::span<const double> precision);

}  // namespace fruitscan::metrics
