#include "fruitscan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fruitscan/error.hpp"

namespace fruitscan::metrics {

std::string_view to_string(Trait trait) {
    switch (trait) {
        case Trait::Width: return "width";
        case Trait::Height: return "height";
        case Trait::Area: return "area";
        case Trait::Volume: return "volume";
    }
    return "unknown";
}

const formats::TraitTriple& trait_of(const formats::GroundTruthRow& row, Trait trait) {
    switch (trait) {
        case Trait::Width: return row.width;
        case Trait::Height: return row.height;
        case Trait::Area: return row.area;
        case Trait::Volume: return row.volume;
    }
    return row.width;
}

double relative_error(double truth, double predicted) {
    if (!(truth > 0.0)) throw Error(ErrorCode::InvalidArgument, "ground-truth value must be > 0");
    return (predicted - truth) / truth * 100.0;
}

namespace {

double sorted_median(std::span<const double> sorted) {
    const std::size_t n = sorted.size();
    return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

}  // namespace

double median(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "median of an empty list");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    return sorted_median(v);
}

BoxStats box_stats(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "box statistics need at least one value");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    BoxStats s;
    s.n = n;
    s.min = v.front();
    s.max = v.back();
    s.median = sorted_median(v);
    if (n == 1) {
        s.q1 = s.q3 = s.median;
        return s;
    }
    const std::size_t half = n / 2;
    const std::span<const double> all(v);
    s.q1 = sorted_median(all.first(half));
    s.q3 = sorted_median(all.last(half));
    return s;
}

double edge_error_percent(const geometry::Polygon& pred, const geometry::Polygon& gt, int n_samples) {
    const double diagonal = geometry::extents(gt).diagonal();
    if (!(diagonal > 0.0)) throw Error(ErrorCode::Degenerate, "ground-truth polygon has a zero-size bounding box");
    const auto samples = geometry::sample_boundary(pred, n_samples);
    double sum = 0.0;
    for (const auto& p : samples) sum += geometry::point_to_polygon_distance(p, gt);
    return sum / static_cast<double>(samples.size()) / diagonal * 100.0;
}

EdgeErrorReport mean_edge_error(std::span<const MaskPair> pairs, int n_samples) {
    if (pairs.empty()) throw Error(ErrorCode::InvalidArgument, "mEE needs at least one mask pair");
    if (n_samples < 3) throw Error(ErrorCode::InvalidArgument, "mEE needs at least 3 samples per mask");
    EdgeErrorReport report;
    report.pair_count = pairs.size();
    report.samples_per_mask = n_samples;
    report.per_pair_percent.reserve(pairs.size());
    double total = 0.0;
    for (const MaskPair& pair : pairs) {
        const double e = edge_error_percent(pair.pred, pair.gt, n_samples);
        report.per_pair_percent.push_back(e);
        total += e;
    }
    report.mee_percent = total / static_cast<double>(pairs.size());
    return report;
}

double mask_iou(const geometry::Polygon& a, const geometry::Polygon& b, int width, int height) {
    const RasterGrid ra = geometry::rasterize(a, width, height);
    const RasterGrid rb = geometry::rasterize(b, width, height);
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        const bool in_a = ra.data()[i] != 0.0;
        const bool in_b = rb.data()[i] != 0.0;
        inter += (in_a && in_b) ? 1 : 0;
        uni += (in_a || in_b) ? 1 : 0;
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double average_precision(std::span<const double> recall, std::span<const double> precision) {
    if (recall.size() != precision.size()) {
        throw Error(ErrorCode::DimensionMismatch, "recall and precision lengths differ");
    }
    const std::size_t n = recall.size();
    if (n == 0) return 0.0;
    // Precision envelope: running max from the right.
    std::vector<double> envelope(precision.begin(), precision.end());
    for (std::size_t i = n - 1; i > 0; --i) envelope[i - 1] = std::max(envelope[i - 1], envelope[i]);
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ap += (recall[i] - prev_recall) * envelope[i];
        prev_recall = recall[i];
    }
    return ap;
}

DetectionEval detection_eval(std::span<const DetectionScene> scenes, double iou_threshold,
                             double confidence_threshold) {
    struct Scored {
        double confidence;
        bool true_positive;
        std::size_t order;  // global input order, breaks confidence ties
    };
    std::vector<Scored> scored;
    std::size_t total_gt = 0;
    std::size_t order = 0;

    for (const DetectionScene& scene : scenes) {
        total_gt += scene.ground_truth.size();
        std::vector<std::size_t> idx(scene.predictions.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return scene.predictions[a].confidence > scene.predictions[b].confidence;
        });

        std::vector<RasterGrid> gt_masks;
        gt_masks.reserve(scene.ground_truth.size());
        for (const auto& g : scene.ground_truth) gt_masks.push_back(geometry::rasterize(g, scene.width, scene.height));
        std::vector<bool> claimed(scene.ground_truth.size(), false);

        for (const std::size_t p : idx) {
            const RasterGrid pm = geometry::rasterize(scene.predictions[p].polygon, scene.width, scene.height);
            double best_iou = -1.0;
            std::size_t best = claimed.size();
            for (std::size_t g = 0; g < gt_masks.size(); ++g) {
                if (claimed[g]) continue;
                std::size_t inter = 0;
                std::size_t uni = 0;
                for (std::size_t i = 0; i < pm.size(); ++i) {
                    const bool a = pm.data()[i] != 0.0;
                    const bool b = gt_masks[g].data()[i] != 0.0;
                    inter += (a && b) ? 1 : 0;
                    uni += (a || b) ? 1 : 0;
                }
                const double iou = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
                if (iou > best_iou) {
                    best_iou = iou;
                    best = g;
                }
            }
            const bool tp = best < claimed.size() && best_iou >= iou_threshold;
            if (tp) claimed[best] = true;
            scored.push_back({scene.predictions[p].confidence, tp, order++});
        }
    }

    std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        return a.order < b.order;
    });

    DetectionEval eval;
    eval.iou_threshold = iou_threshold;
    eval.confidence_threshold = confidence_threshold;
    eval.ground_truths = total_gt;

    std::vector<double> recall;
    std::vector<double> precision;
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (const Scored& s : scored) {
        (s.true_positive ? tp : fp) += 1;
        recall.push_back(total_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(total_gt));
        precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
        if (s.confidence >= confidence_threshold) {
            (s.true_positive ? eval.true_positives : eval.false_positives) += 1;
        }
    }
    const std::size_t kept = eval.true_positives + eval.false_positives;
    eval.precision = kept == 0 ? 0.0 : static_cast<double>(eval.true_positives) / static_cast<double>(kept);
    eval.recall = total_gt == 0 ? 0.0 : static_cast<double>(eval.true_positives) / static_cast<double>(total_gt);
    eval.map50 = average_precision(recall, precision);
    return eval;
}

}  // namespace fruitscan::metrics
